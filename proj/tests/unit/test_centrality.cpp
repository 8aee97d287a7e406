#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "evsite/centrality.hpp"
#include "evsite/errors.hpp"
#include "evsite/synthetic.hpp"

using namespace evsite;
using Pair = std::pair<std::size_t, std::size_t>;

namespace {

RoadGraph cycle(std::size_t n) {
  std::vector<Point2> pos(n);
  std::vector<Pair> e;
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = {1000.0 * std::cos(2 * M_PI * i / n), 1000.0 * std::sin(2 * M_PI * i / n)};
    e.emplace_back(i, (i + 1) % n);
  }
  return graph_from_edges("c", pos, e, GridSpec());
}

Eigen::MatrixXd random_features(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), kNodeFeatureDim);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = u(rng);
  return x;
}

// Flattened parameter access for the finite-difference check.
double& param(GnnModel& m, std::size_t k) {
  const auto n1 = static_cast<std::size_t>(m.w1.size());
  const auto h = static_cast<std::size_t>(m.b1.size());
  if (k < n1) return m.w1.data()[k];
  k -= n1;
  if (k < h) return m.b1.data()[k];
  k -= h;
  if (k < h) return m.w2.data()[k];
  return m.b2;
}

std::size_t param_count(const GnnModel& m) {
  return static_cast<std::size_t>(m.w1.size() + m.b1.size() + m.w2.size() + 1);
}

}  // namespace

TEST_CASE("zero model outputs one half") {
  const RoadGraph g = cycle(6);
  std::mt19937_64 rng(1);
  const auto s = forward(zero_model(kNodeFeatureDim, 16), g, random_features(6, rng));
  for (double v : s.values) CHECK(v == 0.5);
}

TEST_CASE("symmetric cycle with identical features scores identically") {
  const RoadGraph g = cycle(6);
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(6, kNodeFeatureDim, 0.3);
  const auto s = forward(init_model(kNodeFeatureDim, 16, 9), g, x);
  for (double v : s.values) CHECK(v == doctest::Approx(s.values[0]).epsilon(1e-15));
}

TEST_CASE("isolated node aggregates over itself only") {
  std::vector<Point2> pos{{0, 0}, {100, 0}, {5000, 5000}};
  const RoadGraph g = graph_from_edges("z", pos, std::vector<Pair>{{0, 1}}, GridSpec());
  std::mt19937_64 rng(2);
  Eigen::MatrixXd x = random_features(3, rng);
  const Eigen::MatrixXd agg = mean_aggregate(g, x);
  CHECK((agg.row(2) - x.row(2)).norm() == 0.0);
  CHECK((agg.row(0) - 0.5 * (x.row(0) + x.row(1))).norm() < 1e-15);
}

TEST_CASE("forward output stays in (0,1) and is permutation-equivariant") {
  std::mt19937_64 rng(3);
  const RoadGraph g = random_geometric_graph("z", 40, {0, 0}, 5000, 6, rng, GridSpec());
  const std::size_t n = g.size();
  const Eigen::MatrixXd x = random_features(n, rng);
  const GnnModel m = init_model(kNodeFeatureDim, 16, 4);
  const auto s = forward(m, g, x);
  for (double v : s.values) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Point2> pos(n);
  Eigen::MatrixXd px(x.rows(), x.cols());
  for (std::size_t v = 0; v < n; ++v) {
    pos[perm[v]] = g.nodes()[v].xy;
    px.row(static_cast<Eigen::Index>(perm[v])) = x.row(static_cast<Eigen::Index>(v));
  }
  std::vector<Pair> pe;
  for (const RoadEdge& e : g.edges()) pe.emplace_back(perm[e.a], perm[e.b]);
  const RoadGraph pg = graph_from_edges("z", pos, pe, GridSpec());
  const auto ps = forward(m, pg, px);
  for (std::size_t v = 0; v < n; ++v) CHECK(ps.values[perm[v]] == doctest::Approx(s.values[v]).epsilon(1e-12));
}

TEST_CASE("dimension mismatch is rejected") {
  const RoadGraph g = cycle(5);
  CHECK_THROWS_AS(forward(zero_model(7, 4), g, Eigen::MatrixXd::Zero(5, kNodeFeatureDim)),
                  ValidationError);
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(10);
  std::vector<Point2> pos(10);
  std::uniform_real_distribution<double> u(0, 2000);
  for (auto& p : pos) p = {u(rng), u(rng)};
  std::vector<Pair> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 9}, {0, 5}, {2, 7}};
  const RoadGraph g = graph_from_edges("z", pos, e, GridSpec());
  const Eigen::MatrixXd x = random_features(10, rng);
  std::vector<double> targets = betweenness(g);
  const std::vector<TrainingZone> zones{make_training_zone(g, x, targets)};
  GnnModel m = init_model(kNodeFeatureDim, 16, 5);
  m.b1.setConstant(0.05);  // keep pre-activations away from the ReLU kink
  m.b2 = -0.1;
  GnnModel grad = mse_gradient(m, zones);
  int bad = 0;
  for (std::size_t k = 0; k < param_count(m); ++k) {
    GnnModel plus = m, minus = m;
    const double h = 1e-6;
    param(plus, k) += h;
    param(minus, k) -= h;
    const double fd = (mse_loss(plus, zones) - mse_loss(minus, zones)) / (2 * h);
    const double an = param(grad, k);
    const double scale = std::max({std::abs(fd), std::abs(an), 1e-7});
    if (std::abs(fd - an) / scale > 1e-4) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("training from zero with constant targets is already optimal") {
  const RoadGraph g = cycle(8);
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd x = random_features(8, rng);
  const std::vector<double> half(8, 0.5);
  const std::vector<TrainingZone> zones{make_training_zone(g, x, half)};
  const TrainResult r = train_from(zero_model(kNodeFeatureDim, 16), zones, TrainConfig{});
  CHECK(r.loss_history.front() < 1e-6);
  CHECK(r.final_loss < 1e-6);
}

TEST_CASE("training loss is non-increasing") {
  std::mt19937_64 rng(13);
  const RoadGraph g = random_geometric_graph("z", 80, {0, 0}, 8000, 10, rng, GridSpec());
  const Eigen::MatrixXd x = node_features(g, std::vector<double>(g.size(), 0.0));
  const std::vector<TrainingZone> zones{make_training_zone(g, x, betweenness(g))};
  TrainConfig cfg;
  cfg.epochs = 200;
  const TrainResult r = train(zones, cfg);
  for (std::size_t i = 1; i < r.loss_history.size(); ++i)
    CHECK(r.loss_history[i] <= r.loss_history[i - 1]);
  CHECK(r.final_loss < r.loss_history.front());
}

TEST_CASE("targets outside [0,1] are rejected") {
  const RoadGraph g = cycle(4);
  CHECK_THROWS_AS(make_training_zone(g, Eigen::MatrixXd::Zero(4, kNodeFeatureDim),
                                     std::vector<double>{0, 1, 2, 0}),
                  ValidationError);
}

TEST_CASE("node features are finite and bounded") {
  std::mt19937_64 rng(14);
  const RoadGraph g = random_gabriel_graph("z", 60, {0, 0}, 6000, rng, GridSpec());
  std::vector<double> poi(g.size());
  for (std::size_t i = 0; i < poi.size(); ++i) poi[i] = static_cast<double>(i % 7);
  const Eigen::MatrixXd x = node_features(g, poi);
  CHECK(x.cols() == kNodeFeatureDim);
  CHECK(x.allFinite());
  CHECK(x.minCoeff() >= -1.0);
  CHECK(x.maxCoeff() <= 1.0);
  CHECK(x.col(0).maxCoeff() == 1.0);
  CHECK(x.col(9).maxCoeff() == 1.0);
}

TEST_CASE("percentile filter") {
  const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
  CHECK(percentile_filter(s, 0.5) == std::vector<bool>{false, false, true, true});
  const std::vector<double> flat(5, 0.4);
  CHECK(percentile_filter(flat, 0.5) == std::vector<bool>(5, true));
  CHECK(percentile_filter(s, 1e-9) == std::vector<bool>(4, true));
  CHECK_THROWS_AS(percentile_filter(std::vector<double>{}, 0.5), ValidationError);
  CHECK_THROWS_AS(percentile_filter(s, 0.0), ValidationError);
  CHECK_THROWS_AS(percentile_filter(s, 1.0), ValidationError);
}

TEST_CASE("percentile filter keeps at least half") {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> u(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 37;
    std::vector<double> s(n);
    for (double& v : s) v = u(rng) / 5.0;
    const auto kept = percentile_filter(s, 0.5);
    const auto count = static_cast<std::size_t>(std::count(kept.begin(), kept.end(), true));
    CHECK(count >= (n + 1) / 2);
    CHECK(count <= n);
  }
}

TEST_CASE("model JSON round trip") {
  const GnnModel m = init_model(kNodeFeatureDim, 16, 77);
  const GnnModel back = model_from_json(model_to_json(m));
  CHECK(back.w1 == m.w1);
  CHECK(back.b1 == m.b1);
  CHECK(back.w2 == m.w2);
  CHECK(back.b2 == m.b2);
  auto doc = model_to_json(m);
  doc["version"] = 99;
  CHECK_THROWS(model_from_json(doc));
}
