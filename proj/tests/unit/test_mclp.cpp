#include <doctest.h>

#include <cmath>
#include <random>

#include "evsite/errors.hpp"
#include "evsite/mclp.hpp"
#include "oracles/spatial_oracle.hpp"

using namespace evsite;

namespace {

CandidateSite site(std::int64_t id, Point2 xy, double sigma = 0.0, const char* zone = "z") {
  CandidateSite c;
  c.id = id;
  c.xy = xy;
  c.sigma = sigma;
  c.zone_id = zone;
  return c;
}

// Index with hand-written sets; geometry is irrelevant to the greedy.
CoverageIndex manual(std::vector<std::vector<std::size_t>> sets, std::size_t demand) {
  CoverageIndex idx;
  idx.radius_m = 1;
  idx.demand_count = demand;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    idx.site_ids.push_back(static_cast<std::int64_t>(i));
    idx.sigma.push_back(0.0);
    idx.zone_ids.push_back("z");
  }
  idx.sets = std::move(sets);
  return idx;
}

}  // namespace

TEST_CASE("coverage index basics") {
  const std::vector<Point2> demand{{0, 0}};
  const std::vector<CandidateSite> far{site(1, {6000, 0})};
  CHECK(build_coverage_index(far, demand, 5000).sets[0].empty());
  const std::vector<CandidateSite> same{site(1, {0, 0})};
  CHECK(build_coverage_index(same, demand, 5000).sets[0] == std::vector<std::size_t>{0});
  const std::vector<CandidateSite> edge{site(1, {5000, 0})};
  CHECK(build_coverage_index(edge, demand, 5000).sets[0].size() == 1);
  CHECK_THROWS_AS(build_coverage_index(same, demand, 0), ValidationError);
}

TEST_CASE("coverage index equals brute force") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 30000);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<CandidateSite> c;
    std::vector<Point2> cxy;
    for (int i = 0; i < 100; ++i) {
      c.push_back(site(i, {u(rng), u(rng)}));
      cxy.push_back(c.back().xy);
    }
    std::vector<Point2> d(1000);
    for (auto& p : d) p = {u(rng), u(rng)};
    CHECK(build_coverage_index(c, d, 5000).sets == oracle::band_sets(cxy, d, 5000));
  }
}

TEST_CASE("greedy budget edge cases") {
  const std::vector<double> w{1, 2, 3};
  const auto idx = manual({{0}, {0, 1, 2}, {2}}, 3);
  CHECK(greedy_budget(idx, w, 0).steps.empty());
  CHECK(greedy_budget(idx, w, 0).coverage_fraction == 0.0);
  const auto r = greedy_budget(idx, w, 3);
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].site == 1);
  CHECK(r.coverage_fraction == 1.0);
}

TEST_CASE("greedy ties prefer higher sigma then lower id") {
  const std::vector<double> w{1, 1};
  auto idx = manual({{0}, {1}, {0}}, 2);
  idx.sigma = {0.2, 0.2, 0.9};
  auto r = greedy_budget(idx, w, 1);
  CHECK(r.steps[0].site == 2);
  idx.sigma = {0.2, 0.2, 0.2};
  idx.site_ids = {5, 3, 9};
  r = greedy_budget(idx, w, 1);
  CHECK(r.steps[0].site == 1);
}

TEST_CASE("greedy meets the 1 - 1/e bound on exhaustive instances") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0, 10000), wd(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CandidateSite> c;
    std::vector<Point2> cxy;
    for (int i = 0; i < 10; ++i) {
      c.push_back(site(i, {u(rng), u(rng)}));
      cxy.push_back(c.back().xy);
    }
    std::vector<Point2> d(40);
    std::vector<double> w(40);
    for (std::size_t j = 0; j < d.size(); ++j) {
      d[j] = {u(rng), u(rng)};
      w[j] = wd(rng);
    }
    const auto idx = build_coverage_index(c, d, 2500);
    const auto r = greedy_budget(idx, w, 3);
    const double opt = oracle::exhaustive_cover(idx.sets, w, 3);
    CHECK(r.covered_demand >= (1 - std::exp(-1.0)) * opt - 1e-12);
    for (std::size_t s = 1; s < r.steps.size(); ++s)
      CHECK(r.steps[s].marginal_demand <= r.steps[s - 1].marginal_demand);
    // Coverage is monotone in P.
    double prev = 0.0;
    for (int P = 0; P <= 6; ++P) {
      const double cov = greedy_budget(idx, w, P).covered_demand;
      CHECK(cov >= prev);
      prev = cov;
    }
  }
}

TEST_CASE("layered alpha trace") {
  // Ten unit-demand points. A covers 0..4 (50 %), B covers 4..6 (30 %),
  // C covers 7..9 (30 %). Greedy: A (5), then C (3) → 80 %.
  const std::vector<double> w(10, 1.0);
  const auto idx = manual({{0, 1, 2, 3, 4}, {4, 5, 6}, {7, 8, 9}}, 10);
  const auto r = greedy_coverage(idx, w, 0.8);
  REQUIRE(r.steps.size() == 2);
  CHECK(r.steps[0].site == 0);
  CHECK(r.steps[1].site == 2);
  CHECK(r.coverage_fraction == doctest::Approx(0.8));
  // Replaying with P = |X| yields the same prefix.
  const auto b = greedy_budget(idx, w, 2);
  CHECK(b.steps[0].site == 0);
  CHECK(b.steps[1].site == 2);
}

TEST_CASE("alpha edge cases") {
  const std::vector<double> w{1, 1, 1};
  const auto all = manual({{0, 1, 2}, {0}}, 3);
  const auto r = greedy_coverage(all, w, 1.0);
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].site == 0);
  const auto part = manual({{0}, {1}}, 3);
  try {
    greedy_coverage(part, w, 0.9);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("0.666667") != std::string::npos);
  }
  CHECK_THROWS_AS(greedy_coverage(all, w, 0.0), ValidationError);
  CHECK_THROWS_AS(greedy_coverage(all, w, 1.1), ValidationError);
}

TEST_CASE("zone cap limits per-zone picks") {
  const std::vector<double> w{1, 1, 1, 1};
  auto idx = manual({{0}, {1}, {2}, {3}}, 4);
  idx.zone_ids = {"a", "a", "a", "b"};
  GreedyOptions opt;
  opt.zone_cap = 1;
  const auto r = greedy_budget(idx, w, 4, opt);
  CHECK(r.steps.size() == 2);
  CHECK_THROWS_AS(greedy_coverage(idx, w, 0.75, opt), InfeasibleError);
}

TEST_CASE("rank scores and top-k") {
  std::vector<CandidateSite> c;
  const double sig[] = {0.9, 0.7, 0.5, 0.3, 0.2, 0.1};
  for (int i = 0; i < 6; ++i) c.push_back(site(i, {0, 0}, sig[i]));
  auto top = rank_per_zone(c, 5);
  CHECK(top.size() == 5);
  CHECK(top.back().id == 4);
  c[0].excluded = true;
  top = rank_per_zone(c, 5);
  CHECK(top.front().id == 1);
  std::vector<CandidateSite> small(c.begin() + 1, c.begin() + 4);
  CHECK(rank_per_zone(small, 5).size() == 3);
  CHECK_THROWS_AS(rank_per_zone(c, 0), ValidationError);

  std::vector<CandidateSite> z{site(1, {0, 0}), site(2, {0, 0}), site(3, {0, 0}, 0, "y")};
  z[0].poi_load = 10;
  z[0].c_gnn = 0.2;
  z[1].poi_load = 0;
  z[1].c_gnn = 0.6;
  z[2].poi_load = 3;
  z[2].c_gnn = 0.5;
  compute_rank_scores(z, 0.6, 0.4);
  CHECK(z[0].sigma == doctest::Approx(0.6));
  CHECK(z[1].sigma == doctest::Approx(0.4));
  CHECK(z[2].sigma == 0.0);  // single-member zone normalises to 0
}

TEST_CASE("zone scoring") {
  std::vector<CandidateSite> c{site(1, {0, 0}), site(2, {0, 0})};
  c[0].c_gnn = 1.0;
  c[1].c_gnn = 0.0;
  const std::vector<double> cov{0.0, 1.0};
  auto r = score_zone_sites(c, cov, 0.4, 0.6);
  REQUIRE(r.chosen.size() == 1);
  CHECK(r.chosen[0].site_id == 2);
  CHECK(score_zone_sites(c, cov, 1.0, 0.0).chosen[0].site_id == 1);
  CHECK(score_zone_sites(c, cov, 0.0, 1.0).chosen[0].site_id == 2);
  c.push_back(site(3, {0, 0}, 0, "empty"));
  c.back().excluded = true;
  const std::vector<double> cov3{0.0, 1.0, 5.0};
  r = score_zone_sites(c, cov3, 0.4, 0.6);
  CHECK(r.skipped == std::vector<std::string>{"empty"});
  CHECK_THROWS_AS(score_zone_sites(c, cov3, 0.0, 0.0), ValidationError);
}
