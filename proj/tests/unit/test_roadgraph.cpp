#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "evsite/errors.hpp"
#include "evsite/roadgraph.hpp"
#include "evsite/synthetic.hpp"
#include "oracles/graph_oracle.hpp"

using namespace evsite;
using Pair = std::pair<std::size_t, std::size_t>;
using boost::multiprecision::cpp_rational;

namespace {

RoadGraph make(std::size_t n, const std::vector<Pair>& edges) {
  std::vector<Point2> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = {100.0 * i, 50.0 * (i % 3)};
  return graph_from_edges("z", pos, edges, GridSpec());
}

RoadGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Pair> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (coin(rng)) edges.emplace_back(a, b);
  return make(n, edges);
}

}  // namespace

TEST_CASE("path a-b-c-d") {
  const RoadGraph g = make(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(betweenness_raw(g) == std::vector<double>{0, 2, 2, 0});
  CHECK(betweenness(g) == std::vector<double>{0, 1, 1, 0});
}

TEST_CASE("star and complete graph") {
  const RoadGraph star = make(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  CHECK(betweenness(star) == std::vector<double>{1, 0, 0, 0, 0});
  const RoadGraph k4 = make(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(betweenness_raw(k4) == std::vector<double>{0, 0, 0, 0});
  CHECK(betweenness(k4) == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("single node gives zeros") {
  const RoadGraph g = make(1, {});
  CHECK(betweenness(g) == std::vector<double>{0});
}

TEST_CASE("degrees of a 5x5 grid") {
  std::vector<Pair> e;
  auto id = [](std::size_t r, std::size_t c) { return r * 5 + c; };
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      if (c + 1 < 5) e.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < 5) e.emplace_back(id(r, c), id(r + 1, c));
    }
  const RoadGraph g = make(25, e);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      const int border = (r == 0 || r == 4) + (c == 0 || c == 4);
      CHECK(g.nodes()[id(r, c)].degree == 4 - border);
    }
}

TEST_CASE("polygon clipping") {
  const GridSpec spec;
  std::vector<LatLon> poly;
  for (Point2 p : {Point2{0, 0}, Point2{1000, 0}, Point2{1000, 1000}, Point2{0, 1000}})
    poly.push_back(spec.unproject(p));
  auto at = [&](double x, double y) { return spec.unproject({x, y}); };
  std::vector<EdgeRecord> edges{
      {"z", "a", "b", at(100, 100), at(900, 100)},
      {"z", "b", "c", at(900, 100), at(900, 900)},
      {"z", "c", "d", at(900, 900), at(100, 900)},
      {"z", "d", "a", at(100, 900), at(100, 100)},
      {"z", "a", "x", at(100, 100), at(2000, 100)},  // leaves the polygon
      {"z", "a", "a", at(100, 100), at(100, 100)},   // self-loop
      {"z", "b", "a", at(900, 100), at(100, 100)},   // duplicate
      {"other", "p", "q", at(200, 200), at(300, 300)},
  };
  const RoadGraph g = build_graph("z", poly, edges, spec);
  CHECK(g.size() == 4);
  CHECK(g.edges().size() == 4);
  for (const RoadNode& n : g.nodes()) CHECK(n.degree == 2);
  CHECK(g.edges()[0].length_m == doctest::Approx(800.0).epsilon(1e-6));

  const std::vector<EdgeRecord> outside{{"z", "x", "y", at(5000, 5000), at(6000, 5000)}};
  CHECK_THROWS_AS(build_graph("z", poly, outside, spec), ValidationError);
}

TEST_CASE("Brandes matches explicit path enumeration on small graphs") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const RoadGraph g = random_graph(rng, 9, 0.3);
    const auto got = betweenness_raw(g);
    const auto want = oracle::enumerated_betweenness(g);
    for (std::size_t v = 0; v < g.size(); ++v) CHECK(got[v] == doctest::Approx(want[v]).epsilon(1e-12));
  }
}

TEST_CASE("exact rational Brandes equals naive pair counting") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const RoadGraph g = random_graph(rng, 30, 0.12);
    CHECK(brandes_hops<cpp_rational>(g) == oracle::naive_betweenness<cpp_rational>(g));
  }
}

TEST_CASE("betweenness is invariant under relabeling") {
  std::mt19937_64 rng(23);
  const std::size_t n = 25;
  std::bernoulli_distribution coin(0.15);
  std::vector<Pair> e;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (coin(rng)) e.emplace_back(a, b);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Pair> pe;
  for (auto [a, b] : e) pe.emplace_back(perm[a], perm[b]);
  const auto base = brandes_hops<cpp_rational>(make(n, e));
  const auto shuf = brandes_hops<cpp_rational>(make(n, pe));
  for (std::size_t v = 0; v < n; ++v) CHECK(base[v] == shuf[perm[v]]);
}

TEST_CASE("length metric reduces to hops on unit edges") {
  // Collinear unit-spaced path: lengths equal hops times spacing.
  std::vector<Point2> pos{{0, 0}, {100, 0}, {200, 0}, {300, 0}, {400, 0}};
  const RoadGraph g = graph_from_edges("z", pos, std::vector<Pair>{{0, 1}, {1, 2}, {2, 3}, {3, 4}},
                                       GridSpec());
  CHECK(betweenness_raw(g, PathMetric::kLength) == betweenness_raw(g, PathMetric::kHops));
}

TEST_CASE("length metric prefers the short detour") {
  // Square 0-1-2-3: each opposite pair has two equal-length routes.
  std::vector<Point2> pos{{0, 0}, {100, 0}, {100, 100}, {0, 100}};
  const RoadGraph g = graph_from_edges(
      "z", pos, std::vector<Pair>{{0, 1}, {1, 2}, {2, 3}, {3, 0}}, GridSpec());
  const auto bc = betweenness_raw(g, PathMetric::kLength);
  for (double v : bc) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("min-max normalisation") {
  CHECK(minmax_normalize(std::vector<double>{2, 4, 6}) == std::vector<double>{0, 0.5, 1});
  CHECK(minmax_normalize(std::vector<double>{3, 3}) == std::vector<double>{0, 0});
  CHECK(minmax_normalize(std::vector<double>{}).empty());
}

TEST_CASE("components are handled independently") {
  const RoadGraph g = make(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
  CHECK(betweenness_raw(g) == std::vector<double>{0, 1, 0, 0, 1, 0});
}

TEST_CASE("synthetic generators give connected graphs") {
  std::mt19937_64 rng(4);
  const RoadGraph g = random_gabriel_graph("z", 80, {0, 0}, 10000, rng, GridSpec());
  CHECK(g.size() > 40);
  const auto d = oracle::hop_distances(g);
  for (std::size_t v = 0; v < g.size(); ++v) CHECK(d[0][v] >= 0);
}
