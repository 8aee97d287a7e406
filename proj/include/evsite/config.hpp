#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evsite/hexgrid.hpp"
#include "evsite/queueing.hpp"
#include "evsite/roadgraph.hpp"

namespace evsite {

// Fixed stage order; a config listing anything else is rejected.
inline const std::vector<std::string> kStageOrder = {
    "grid", "centrality", "demand", "mclp", "voronoi", "queue", "forecast", "reports"};

struct InputPaths {
  std::filesystem::path cells = "cells.csv";
  std::filesystem::path zones = "zones.geojson";
  std::filesystem::path edges = "edges.csv";
  std::filesystem::path pois = "pois.csv";
  std::filesystem::path counties = "counties.csv";
  std::filesystem::path traffic = "traffic.csv";
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  std::vector<std::string> stages = kStageOrder;

  // grid
  LatLon origin{33.0, -84.0};
  std::array<double, 5> edge_m{14000.0, 5300.0, 2000.0, 760.0, 600.0};
  double meters_per_degree = GridSpec::kDefaultMetersPerDegree;
  int cell_resolution = 8;
  int demand_resolution = 10;
  int hub_resolution = 6;

  // centrality
  double tau = 0.5;
  int hidden_dim = 16;
  double learning_rate = 0.01;
  int epochs = 500;
  PathMetric path_metric = PathMetric::kHops;
  std::vector<std::string> training_zones;  // empty: every zone

  // demand
  double w_pop = 0.6;
  double w_poi = 0.4;
  double income_uplift = 1.0;
  std::map<std::string, double> poi_weights;  // filled with 7 − rank

  // mclp
  double radius_m = 5000.0;
  double beta_poi = 0.6;
  double beta_cent = 0.4;
  double beta_cov = 0.6;
  int k = 5;
  std::optional<int> budget_p;
  std::optional<double> alpha = 0.9;
  std::optional<int> zone_cap;

  // queue
  double utilisation_cap = 0.9;
  double mu_dcfc = kMuDcfc;
  double mu_l2 = kMuL2;
  int n_extra = 10;
  int c_max = 30;
  ServerConvention convention = ServerConvention::kContinuous;
  ChargerType site_charger_type = ChargerType::kDCFC;
  OutageStats outage;
  CostTable costs;

  // voronoi
  double reach_threshold_m = 30000.0;
  int hub_min_ports = 5;

  // forecast
  int base_year = 2025;
  std::vector<int> years{2026, 2027, 2028, 2029, 2030};
  std::map<int, double> envelope;

  // reports
  std::vector<double> radii_m{5000.0, 10000.0, 30000.0};
  std::size_t area_samples = 100000;
  int capacity_base_year = 2024;
  int capacity_target_year = 2030;
  double dcfc_base = 2216.0;
  double dcfc_target = 4353.0;
  double l2_base = 13725.0;
  double l2_target = 28793.0;

  InputPaths inputs;
  std::filesystem::path output_dir = "out";

  PipelineConfig();

  GridSpec grid() const;
  double mu(ChargerType t) const { return t == ChargerType::kDCFC ? mu_dcfc : mu_l2; }
};

nlohmann::json config_to_json(const PipelineConfig& c);

// Missing keys keep their defaults; unknown keys are rejected so typos fail
// loudly. Relative input paths resolve against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = {});

// Applies "a.b.c=value" to the JSON document. The value is parsed as JSON
// when it parses, otherwise taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Reads the file (or starts from defaults when `path` is empty), applies the
// overrides, then parses and validates.
PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {});

void validate_config(const PipelineConfig& c);

}  // namespace evsite
