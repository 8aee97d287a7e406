#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "evsite/roadgraph.hpp"

namespace evsite {

// degree, 8 positional encodings, POI density
inline constexpr int kNodeFeatureDim = 10;

// Per-node input features, one row per node:
//   [0]    degree / max degree in the zone
//   [1..4] sin/cos(π·u), sin/cos(2π·u) with u the zone-normalised latitude
//   [5..8] the same for longitude
//   [9]    POI density of the containing cell, min-max normalised in the zone
Eigen::MatrixXd node_features(const RoadGraph& g, std::span<const double> poi_density);

// Mean over {v} ∪ N(v) of the input rows.
Eigen::MatrixXd mean_aggregate(const RoadGraph& g, const Eigen::MatrixXd& features);

struct GnnModel {
  Eigen::MatrixXd w1;  // hidden × input
  Eigen::VectorXd b1;  // hidden
  Eigen::VectorXd w2;  // hidden (the single output row)
  double b2 = 0.0;

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }
};

// Xavier-uniform weights from a seeded engine, zero biases.
GnnModel init_model(int input_dim, int hidden_dim, std::uint64_t seed);
GnnModel zero_model(int input_dim, int hidden_dim);

struct CentralityScores {
  std::string zone_id;
  std::vector<double> values;
};

// c_v = sigmoid(w2 · ReLU(W1 · mean_agg(x)_v + b1) + b2)
CentralityScores forward(const GnnModel& model, const RoadGraph& g, const Eigen::MatrixXd& features);

// Forward pass on already-aggregated rows.
Eigen::VectorXd forward_aggregated(const GnnModel& model, const Eigen::MatrixXd& aggregated);

struct TrainingZone {
  Eigen::MatrixXd aggregated;
  Eigen::VectorXd targets;
};

TrainingZone make_training_zone(const RoadGraph& g, const Eigen::MatrixXd& features,
                                std::span<const double> targets);

// Mean squared error over all nodes of all zones.
double mse_loss(const GnnModel& model, std::span<const TrainingZone> zones);

// Analytic gradient of mse_loss, returned in the model's own shape.
GnnModel mse_gradient(const GnnModel& model, std::span<const TrainingZone> zones);

struct TrainConfig {
  int hidden_dim = 16;
  double learning_rate = 0.01;
  int epochs = 500;
  std::uint64_t seed = 42;
};

struct TrainResult {
  GnnModel model;
  double final_loss = 0.0;
  std::vector<double> loss_history;  // loss before each epoch, then the final loss
};

// Full-batch training. A step that would raise the loss is rejected and the
// step size halved, so the loss history is non-increasing.
// Throws NumericError on a non-finite loss.
TrainResult train(std::span<const TrainingZone> zones, const TrainConfig& config);
TrainResult train_from(GnnModel model, std::span<const TrainingZone> zones,
                       const TrainConfig& config);

// Nearest-rank threshold that keeps the top n - floor(τ·n) scores; ties at the
// threshold are all kept.
double quantile_threshold(std::span<const double> scores, double tau);
std::vector<bool> percentile_filter(std::span<const double> scores, double tau);

nlohmann::json model_to_json(const GnnModel& model);
GnnModel model_from_json(const nlohmann::json& doc);

}  // namespace evsite
