#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evsite/config.hpp"
#include "evsite/equity.hpp"
#include "evsite/io.hpp"
#include "evsite/mclp.hpp"
#include "evsite/queueing.hpp"
#include "evsite/voronoi.hpp"

namespace evsite {

struct PipelineInputs {
  std::vector<HexCell> cells;
  std::vector<Zone> zones;
  std::vector<EdgeRecord> edges;
  std::vector<PoiRecord> pois;
  std::vector<CountyStats> counties;
  std::vector<TrafficRow> traffic;
};

// Non-fatal findings; fatal problems throw ValidationError instead.
struct InputReport {
  std::vector<std::string> warnings;
};

// Schema, range and referential checks over every input file. Returns the
// parsed inputs with warnings collected in `report`.
PipelineInputs load_inputs(const PipelineConfig& config, InputReport& report);
InputReport validate_inputs(const PipelineConfig& config);

struct PlannedSite {
  std::int64_t site_id = 0;
  std::string node_id;  // empty for hubs added by the reachability repair
  std::string zone_id;
  std::string county_id;
  std::string area_type;
  LatLon location;
  Point2 xy;
  bool added_hub = false;
  int min_ports = 1;
  double mu = 0.0;
  std::vector<double> lambda_by_year;  // aligned with BuildPlan::years
  double lambda_design = 0.0;          // max over lambda_by_year
  int activation_year = 0;
  SitePlan plan;
};

struct YearCapital {
  int year = 0;
  int activated = 0;
  double capital = 0.0;
};

struct SelectionRow {
  int step = 0;
  std::int64_t site_id = 0;
  std::string zone_id;
  LatLon location;
  double marginal_demand = 0.0;
  double cumulative_fraction = 0.0;
};

struct ForecastRow {
  std::string county_id;
  int year = 0;
  double beta = 0.0;
};

struct CapacityRow {
  int year = 0;
  long long dcfc = 0;
  long long l2 = 0;
};

struct BuildPlan {
  std::uint64_t seed = 0;
  std::vector<int> years;
  double outage_p = 0.0;
  double utilisation_cap = 0.9;
  std::vector<PlannedSite> sites;  // selection order, then repair hubs
  std::vector<SelectionRow> selection;
  std::vector<ForecastRow> forecast;
  double demand_total = 0.0;
  double demand_covered = 0.0;
  ReachabilityReport reachability;
  double reach_threshold_m = kReachThresholdM;
  std::vector<YearCapital> capital;
  std::vector<CoverageMetrics> coverage;
  EquityReport equity;
  double cagr_dcfc = 0.0;
  double cagr_l2 = 0.0;
  std::vector<CapacityRow> capacity;
};

// Earliest year whose λ makes ρ_eff exceed the cap at `min_ports`; the first
// year when no year does.
int activation_year(std::span<const double> lambda_by_year, std::span<const int> years, double mu,
                    double p, double cap, int min_ports);

// Sets each site's activation year and returns the per-year capital
// (Σ C_station of sites first active that year). Hubs added by the repair
// loop activate in the first year, since the reachability guarantee needs them.
std::vector<YearCapital> stage_plan_by_year(BuildPlan& plan);

struct RunOptions {
  bool debug = false;  // also write every stage's intermediate artifact
};

// Runs every stage in order and writes the outputs into config.output_dir.
BuildPlan run(const PipelineConfig& config, const RunOptions& options = {});

// Coverage, equity and capacity sections for a set of site locations.
void compute_reports(BuildPlan& plan, const PipelineConfig& config,
                     std::span<const HexCell> cells);

nlohmann::json plan_to_geojson(const BuildPlan& plan);
nlohmann::json metrics_to_json(const BuildPlan& plan);
void write_plan(const BuildPlan& plan, const std::filesystem::path& dir);

// Reads site locations back from a build_plan.geojson and recomputes the
// report metrics against the configured cells.
nlohmann::json recompute_report(const PipelineConfig& config,
                                const std::filesystem::path& plan_path);

// Standalone solver over files in the debug-artifact formats
// (candidates.csv, demand_points.csv).
struct SolverRun {
  std::vector<CandidateSite> shortlist;
  CoverageIndex index;
  SelectionResult selection;
};
std::vector<CandidateSite> read_candidates(const std::filesystem::path& path,
                                           const GridSpec& spec);
std::vector<DemandPoint> read_demand_points(const std::filesystem::path& path,
                                            const GridSpec& spec);
SolverRun solve_mclp(std::vector<CandidateSite> candidates, std::span<const DemandPoint> demand,
                     const PipelineConfig& config);
std::string selection_csv(const SolverRun& run);

}  // namespace evsite
