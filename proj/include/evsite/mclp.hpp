#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evsite/geometry.hpp"

namespace evsite {

struct CandidateSite {
  std::int64_t id = 0;
  std::string node_id;  // road-graph node the site sits on, if any
  std::string zone_id;
  LatLon location;
  Point2 xy;
  double c_gnn = 0.0;
  double poi_load = 0.0;
  double sigma = 0.0;
  bool excluded = false;
};

// σ_i = β_poi·π̂ + β_cent·ĉ with π̂ and ĉ min-max normalised per zone.
void compute_rank_scores(std::span<CandidateSite> candidates, double beta_poi, double beta_cent);

// Top-k per zone by σ (ties by id) after dropping excluded sites. Output is
// grouped by zone id, best first within each zone.
std::vector<CandidateSite> rank_per_zone(std::span<const CandidateSite> candidates, int k);

// Distance-band coverage sets S_i = { j : |x_i − x_j| ≤ R } in projected meters.
struct CoverageIndex {
  double radius_m = 0.0;
  std::size_t demand_count = 0;
  std::vector<std::int64_t> site_ids;
  std::vector<double> sigma;
  std::vector<std::string> zone_ids;
  std::vector<std::vector<std::size_t>> sets;  // ascending demand indices

  std::size_t size() const { return sets.size(); }
};

// Squared-distance band test shared by the index and any brute-force check.
inline bool within_band(Point2 a, Point2 b, double radius) {
  return distance_sq(a, b) <= radius * radius;
}

CoverageIndex build_coverage_index(std::span<const CandidateSite> candidates,
                                   std::span<const Point2> demand_xy, double radius_m);

struct SelectionStep {
  std::size_t site = 0;  // position in the CoverageIndex
  double marginal_demand = 0.0;
  double cumulative_demand = 0.0;
  double cumulative_fraction = 0.0;
};

struct SelectionResult {
  std::vector<SelectionStep> steps;
  double total_demand = 0.0;
  double covered_demand = 0.0;
  double coverage_fraction = 0.0;
};

struct GreedyOptions {
  // Maximum selected sites per zone; nullopt means uncapped.
  std::optional<int> zone_cap;
};

// Picks argmax marginal covered demand each step; ties prefer higher σ,
// then lower site id. Stops after P sites or when no site adds demand.
SelectionResult greedy_budget(const CoverageIndex& index, std::span<const double> demand, int budget,
                              const GreedyOptions& options = {});

// Shortest greedy prefix whose coverage reaches α of the total demand.
// Throws InfeasibleError (naming the best achievable fraction) when the union
// of all coverage sets falls short.
SelectionResult greedy_coverage(const CoverageIndex& index, std::span<const double> demand,
                                double alpha, const GreedyOptions& options = {});

// Fraction of demand covered by the union of all sets.
double max_coverage_fraction(const CoverageIndex& index, std::span<const double> demand);

struct ZoneChoice {
  std::string zone_id;
  std::int64_t site_id = 0;
  double score = 0.0;
};

struct ZoneScoring {
  std::vector<ZoneChoice> chosen;       // one per zone, ordered by zone id
  std::vector<std::string> skipped;     // zones whose candidates were all excluded
};

// One site per zone maximising β_cent·ĉ + β_cov·cov̂, both min-max normalised
// within the zone. Ties go to the lower id.
ZoneScoring score_zone_sites(std::span<const CandidateSite> candidates,
                             std::span<const double> coverage_estimate, double beta_cent,
                             double beta_cov);

}  // namespace evsite
