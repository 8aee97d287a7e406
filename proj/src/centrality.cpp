#include "evsite/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "evsite/errors.hpp"

namespace evsite {

namespace {

constexpr int kModelFormatVersion = 1;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_dims(const GnnModel& model, Eigen::Index cols) {
  if (cols != model.input_dim()) {
    throw ValidationError(fmt::format("feature dimension {} does not match model input {}", cols,
                                      model.input_dim()));
  }
}

// Adds `scale * step` to every parameter of `model`.
void axpy(GnnModel& model, double scale, const GnnModel& step) {
  model.w1 += scale * step.w1;
  model.b1 += scale * step.b1;
  model.w2 += scale * step.w2;
  model.b2 += scale * step.b2;
}

}  // namespace

Eigen::MatrixXd node_features(const RoadGraph& g, std::span<const double> poi_density) {
  const std::size_t n = g.size();
  if (poi_density.size() != n) {
    throw ValidationError(fmt::format("zone {}: {} POI densities for {} nodes", g.zone_id(),
                                      poi_density.size(), n));
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), kNodeFeatureDim);
  if (n == 0) return x;

  int max_degree = 0;
  double lat_lo = g.nodes()[0].location.lat, lat_hi = lat_lo;
  double lon_lo = g.nodes()[0].location.lon, lon_hi = lon_lo;
  for (const RoadNode& node : g.nodes()) {
    max_degree = std::max(max_degree, node.degree);
    lat_lo = std::min(lat_lo, node.location.lat);
    lat_hi = std::max(lat_hi, node.location.lat);
    lon_lo = std::min(lon_lo, node.location.lon);
    lon_hi = std::max(lon_hi, node.location.lon);
  }
  auto unit = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.5; };
  const std::vector<double> poi = minmax_normalize(poi_density);
  constexpr double pi = std::numbers::pi;

  for (std::size_t i = 0; i < n; ++i) {
    const RoadNode& node = g.nodes()[i];
    const auto row = static_cast<Eigen::Index>(i);
    x(row, 0) = max_degree > 0 ? static_cast<double>(node.degree) / max_degree : 0.0;
    const double u = unit(node.location.lat, lat_lo, lat_hi);
    const double v = unit(node.location.lon, lon_lo, lon_hi);
    x(row, 1) = std::sin(pi * u);
    x(row, 2) = std::cos(pi * u);
    x(row, 3) = std::sin(2.0 * pi * u);
    x(row, 4) = std::cos(2.0 * pi * u);
    x(row, 5) = std::sin(pi * v);
    x(row, 6) = std::cos(pi * v);
    x(row, 7) = std::sin(2.0 * pi * v);
    x(row, 8) = std::cos(2.0 * pi * v);
    x(row, 9) = poi[i];
  }
  return x;
}

Eigen::MatrixXd mean_aggregate(const RoadGraph& g, const Eigen::MatrixXd& features) {
  if (features.rows() != static_cast<Eigen::Index>(g.size())) {
    throw ValidationError(fmt::format("zone {}: {} feature rows for {} nodes", g.zone_id(),
                                      features.rows(), g.size()));
  }
  Eigen::MatrixXd out(features.rows(), features.cols());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto row = static_cast<Eigen::Index>(v);
    Eigen::RowVectorXd acc = features.row(row);
    for (auto [w, e] : g.neighbors(v)) acc += features.row(static_cast<Eigen::Index>(w));
    out.row(row) = acc / static_cast<double>(g.neighbors(v).size() + 1);
  }
  return out;
}

GnnModel zero_model(int input_dim, int hidden_dim) {
  GnnModel m;
  m.w1 = Eigen::MatrixXd::Zero(hidden_dim, input_dim);
  m.b1 = Eigen::VectorXd::Zero(hidden_dim);
  m.w2 = Eigen::VectorXd::Zero(hidden_dim);
  m.b2 = 0.0;
  return m;
}

GnnModel init_model(int input_dim, int hidden_dim, std::uint64_t seed) {
  if (input_dim <= 0 || hidden_dim <= 0) throw ValidationError("model dimensions must be positive");
  GnnModel m = zero_model(input_dim, hidden_dim);
  std::mt19937_64 rng(seed);
  const double limit1 = std::sqrt(6.0 / (input_dim + hidden_dim));
  const double limit2 = std::sqrt(6.0 / (hidden_dim + 1));
  std::uniform_real_distribution<double> u1(-limit1, limit1);
  std::uniform_real_distribution<double> u2(-limit2, limit2);
  for (Eigen::Index r = 0; r < m.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.w1.cols(); ++c) m.w1(r, c) = u1(rng);
  }
  for (Eigen::Index r = 0; r < m.w2.size(); ++r) m.w2(r) = u2(rng);
  return m;
}

Eigen::VectorXd forward_aggregated(const GnnModel& model, const Eigen::MatrixXd& aggregated) {
  check_dims(model, aggregated.cols());
  const Eigen::MatrixXd hidden =
      ((aggregated * model.w1.transpose()).rowwise() + model.b1.transpose()).cwiseMax(0.0);
  Eigen::VectorXd logits = hidden * model.w2;
  Eigen::VectorXd out(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) out(i) = sigmoid(logits(i) + model.b2);
  return out;
}

CentralityScores forward(const GnnModel& model, const RoadGraph& g, const Eigen::MatrixXd& features) {
  check_dims(model, features.cols());
  const Eigen::VectorXd c = forward_aggregated(model, mean_aggregate(g, features));
  return {g.zone_id(), std::vector<double>(c.data(), c.data() + c.size())};
}

TrainingZone make_training_zone(const RoadGraph& g, const Eigen::MatrixXd& features,
                                std::span<const double> targets) {
  if (targets.size() != g.size()) {
    throw ValidationError(fmt::format("zone {}: {} targets for {} nodes", g.zone_id(),
                                      targets.size(), g.size()));
  }
  for (double t : targets) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ValidationError(fmt::format("zone {}: training target {} outside [0, 1]", g.zone_id(), t));
    }
  }
  TrainingZone zone;
  zone.aggregated = mean_aggregate(g, features);
  zone.targets = Eigen::Map<const Eigen::VectorXd>(targets.data(),
                                                   static_cast<Eigen::Index>(targets.size()));
  return zone;
}

double mse_loss(const GnnModel& model, std::span<const TrainingZone> zones) {
  double sum = 0.0;
  Eigen::Index count = 0;
  for (const TrainingZone& z : zones) {
    sum += (forward_aggregated(model, z.aggregated) - z.targets).squaredNorm();
    count += z.targets.size();
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

GnnModel mse_gradient(const GnnModel& model, std::span<const TrainingZone> zones) {
  GnnModel grad = zero_model(model.input_dim(), model.hidden_dim());
  Eigen::Index count = 0;
  for (const TrainingZone& z : zones) count += z.targets.size();
  if (count == 0) return grad;
  const double scale = 2.0 / static_cast<double>(count);

  for (const TrainingZone& z : zones) {
    check_dims(model, z.aggregated.cols());
    const Eigen::MatrixXd pre =
        (z.aggregated * model.w1.transpose()).rowwise() + model.b1.transpose();
    const Eigen::MatrixXd hidden = pre.cwiseMax(0.0);
    const Eigen::VectorXd logits = (hidden * model.w2).array() + model.b2;
    Eigen::VectorXd g_logit(logits.size());
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      const double c = sigmoid(logits(i));
      g_logit(i) = scale * (c - z.targets(i)) * c * (1.0 - c);
    }
    grad.w2 += hidden.transpose() * g_logit;
    grad.b2 += g_logit.sum();
    // d/d(pre) = g_logit · w2ᵀ masked by the ReLU
    Eigen::MatrixXd g_pre = g_logit * model.w2.transpose();
    g_pre = g_pre.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    grad.w1 += g_pre.transpose() * z.aggregated;
    grad.b1 += g_pre.colwise().sum().transpose();
  }
  return grad;
}

TrainResult train(std::span<const TrainingZone> zones, const TrainConfig& config) {
  if (zones.empty()) throw ValidationError("training needs at least one zone");
  return train_from(init_model(static_cast<int>(zones.front().aggregated.cols()),
                               config.hidden_dim, config.seed),
                    zones, config);
}

TrainResult train_from(GnnModel model, std::span<const TrainingZone> zones,
                       const TrainConfig& config) {
  if (zones.empty()) throw ValidationError("training needs at least one zone");
  if (!(config.learning_rate > 0.0) || config.epochs < 0) {
    throw ValidationError("learning rate must be positive and epochs non-negative");
  }
  TrainResult result;
  double loss = mse_loss(model, zones);
  double step = config.learning_rate;
  GnnModel m1 = zero_model(model.input_dim(), model.hidden_dim());
  GnnModel m2 = m1;
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (!std::isfinite(loss)) {
      throw NumericError(fmt::format("training diverged at epoch {}: loss {}", epoch, loss));
    }
    result.loss_history.push_back(loss);
    const GnnModel grad = mse_gradient(model, zones);
    // Adam moments; the bias-corrected direction is then line-searched.
    m1.w1 = kBeta1 * m1.w1 + (1 - kBeta1) * grad.w1;
    m1.b1 = kBeta1 * m1.b1 + (1 - kBeta1) * grad.b1;
    m1.w2 = kBeta1 * m1.w2 + (1 - kBeta1) * grad.w2;
    m1.b2 = kBeta1 * m1.b2 + (1 - kBeta1) * grad.b2;
    m2.w1 = kBeta2 * m2.w1 + (1 - kBeta2) * grad.w1.cwiseAbs2();
    m2.b1 = kBeta2 * m2.b1 + (1 - kBeta2) * grad.b1.cwiseAbs2();
    m2.w2 = kBeta2 * m2.w2 + (1 - kBeta2) * grad.w2.cwiseAbs2();
    m2.b2 = kBeta2 * m2.b2 + (1 - kBeta2) * grad.b2 * grad.b2;
    const double c1 = 1.0 - std::pow(kBeta1, epoch + 1);
    const double c2 = 1.0 - std::pow(kBeta2, epoch + 1);
    GnnModel direction = zero_model(model.input_dim(), model.hidden_dim());
    direction.w1 = (m1.w1 / c1).array() / ((m2.w1 / c2).array().sqrt() + kEps);
    direction.b1 = (m1.b1 / c1).array() / ((m2.b1 / c2).array().sqrt() + kEps);
    direction.w2 = (m1.w2 / c1).array() / ((m2.w2 / c2).array().sqrt() + kEps);
    direction.b2 = (m1.b2 / c1) / (std::sqrt(m2.b2 / c2) + kEps);

    double trial_step = step;
    GnnModel trial = model;
    axpy(trial, -trial_step, direction);
    double trial_loss = mse_loss(trial, zones);
    int halvings = 0;
    while (!(trial_loss <= loss) && halvings < 30) {
      trial_step /= 2.0;
      trial = model;
      axpy(trial, -trial_step, direction);
      trial_loss = mse_loss(trial, zones);
      ++halvings;
    }
    if (!(trial_loss <= loss)) continue;  // rejected; moments keep evolving
    model = std::move(trial);
    loss = trial_loss;
  }
  if (!std::isfinite(loss)) throw NumericError(fmt::format("training ended with loss {}", loss));
  result.loss_history.push_back(loss);
  result.model = std::move(model);
  result.final_loss = loss;
  return result;
}

double quantile_threshold(std::span<const double> scores, double tau) {
  if (scores.empty()) throw ValidationError("percentile filter on an empty score set");
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ValidationError(fmt::format("percentile tau {} outside (0, 1)", tau));
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  // The epsilon keeps τ·n from landing one rank low on values like 0.29·100.
  auto rank = static_cast<std::size_t>(std::floor(tau * static_cast<double>(sorted.size()) + 1e-9));
  rank = std::min(rank, sorted.size() - 1);
  return sorted[rank];
}

std::vector<bool> percentile_filter(std::span<const double> scores, double tau) {
  const double threshold = quantile_threshold(scores, tau);
  std::vector<bool> kept(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) kept[i] = scores[i] >= threshold;
  return kept;
}

nlohmann::json model_to_json(const GnnModel& model) {
  nlohmann::json w1 = nlohmann::json::array();
  for (Eigen::Index r = 0; r < model.w1.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < model.w1.cols(); ++c) row.push_back(model.w1(r, c));
    w1.push_back(std::move(row));
  }
  return {
      {"format", "evsite-gnn"},
      {"version", kModelFormatVersion},
      {"input_dim", model.input_dim()},
      {"hidden_dim", model.hidden_dim()},
      {"w1", std::move(w1)},
      {"b1", std::vector<double>(model.b1.data(), model.b1.data() + model.b1.size())},
      {"w2", std::vector<double>(model.w2.data(), model.w2.data() + model.w2.size())},
      {"b2", model.b2},
  };
}

GnnModel model_from_json(const nlohmann::json& doc) {
  if (doc.value("format", "") != "evsite-gnn" || doc.value("version", 0) != kModelFormatVersion) {
    throw ValidationError("model file has an unknown format or version");
  }
  const int in = doc.at("input_dim").get<int>();
  const int hidden = doc.at("hidden_dim").get<int>();
  GnnModel m = zero_model(in, hidden);
  const auto& w1 = doc.at("w1");
  const auto b1 = doc.at("b1").get<std::vector<double>>();
  const auto w2 = doc.at("w2").get<std::vector<double>>();
  if (w1.size() != static_cast<std::size_t>(hidden) || b1.size() != w1.size() ||
      w2.size() != w1.size()) {
    throw ValidationError("model file dimensions are inconsistent");
  }
  for (int r = 0; r < hidden; ++r) {
    const auto row = w1[static_cast<std::size_t>(r)].get<std::vector<double>>();
    if (row.size() != static_cast<std::size_t>(in)) {
      throw ValidationError("model file dimensions are inconsistent");
    }
    for (int c = 0; c < in; ++c) m.w1(r, c) = row[static_cast<std::size_t>(c)];
    m.b1(r) = b1[static_cast<std::size_t>(r)];
    m.w2(r) = w2[static_cast<std::size_t>(r)];
  }
  m.b2 = doc.at("b2").get<double>();
  return m;
}

}  // namespace evsite
