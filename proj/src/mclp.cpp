#include "evsite/mclp.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "evsite/errors.hpp"
#include "evsite/kdtree.hpp"
#include "evsite/roadgraph.hpp"

namespace evsite {

namespace {

constexpr double kRelTol = 1e-12;

bool better_rank(const CandidateSite& a, const CandidateSite& b) {
  if (a.sigma != b.sigma) return a.sigma > b.sigma;
  return a.id < b.id;
}

void check_demand(const CoverageIndex& index, std::span<const double> demand) {
  if (demand.size() != index.demand_count) {
    throw ValidationError(fmt::format("coverage index has {} demand points but {} weights given",
                                      index.demand_count, demand.size()));
  }
  for (double d : demand) {
    if (!(d >= 0.0)) throw ValidationError("demand weights must be non-negative");
  }
}

// Shared greedy loop; `done` is consulted before every step.
template <typename Done>
SelectionResult run_greedy(const CoverageIndex& index, std::span<const double> demand,
                           const GreedyOptions& options, Done&& done) {
  check_demand(index, demand);
  SelectionResult result;
  result.total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  std::vector<bool> covered(index.demand_count, false);
  std::vector<bool> chosen(index.size(), false);
  std::map<std::string, int> per_zone;

  auto fraction = [&](double covered_demand) {
    return result.total_demand > 0.0 ? covered_demand / result.total_demand : 0.0;
  };

  while (!done(result)) {
    std::size_t best = index.size();
    double best_gain = 0.0;
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (chosen[i]) continue;
      if (options.zone_cap && !index.zone_ids.empty() &&
          per_zone[index.zone_ids[i]] >= *options.zone_cap) {
        continue;
      }
      double gain = 0.0;
      for (std::size_t j : index.sets[i]) {
        if (!covered[j]) gain += demand[j];
      }
      if (best == index.size() || gain > best_gain ||
          (gain == best_gain && (index.sigma[i] > index.sigma[best] ||
                                 (index.sigma[i] == index.sigma[best] &&
                                  index.site_ids[i] < index.site_ids[best])))) {
        best = i;
        best_gain = gain;
      }
    }
    if (best == index.size() || !(best_gain > 0.0)) break;
    chosen[best] = true;
    if (!index.zone_ids.empty()) ++per_zone[index.zone_ids[best]];
    for (std::size_t j : index.sets[best]) covered[j] = true;
    result.covered_demand += best_gain;
    result.steps.push_back(
        {best, best_gain, result.covered_demand, fraction(result.covered_demand)});
  }
  result.coverage_fraction = fraction(result.covered_demand);
  return result;
}

}  // namespace

void compute_rank_scores(std::span<CandidateSite> candidates, double beta_poi, double beta_cent) {
  if (!(beta_poi >= 0.0) || !(beta_cent >= 0.0)) {
    throw ValidationError("ranking weights must be non-negative");
  }
  std::map<std::string, std::vector<std::size_t>> zones;
  for (std::size_t i = 0; i < candidates.size(); ++i) zones[candidates[i].zone_id].push_back(i);
  for (const auto& [zone, members] : zones) {
    std::vector<double> poi, cent;
    for (std::size_t i : members) {
      poi.push_back(candidates[i].poi_load);
      cent.push_back(candidates[i].c_gnn);
    }
    const std::vector<double> poi_n = minmax_normalize(poi);
    const std::vector<double> cent_n = minmax_normalize(cent);
    for (std::size_t k = 0; k < members.size(); ++k) {
      candidates[members[k]].sigma = beta_poi * poi_n[k] + beta_cent * cent_n[k];
    }
  }
}

std::vector<CandidateSite> rank_per_zone(std::span<const CandidateSite> candidates, int k) {
  if (k < 1) throw ValidationError(fmt::format("top-k per zone needs k >= 1, got {}", k));
  std::map<std::string, std::vector<CandidateSite>> zones;
  for (const CandidateSite& c : candidates) {
    if (!c.excluded) zones[c.zone_id].push_back(c);
  }
  std::vector<CandidateSite> out;
  for (auto& [zone, members] : zones) {
    std::sort(members.begin(), members.end(), better_rank);
    const auto take = std::min(members.size(), static_cast<std::size_t>(k));
    out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

CoverageIndex build_coverage_index(std::span<const CandidateSite> candidates,
                                   std::span<const Point2> demand_xy, double radius_m) {
  if (!(radius_m > 0.0)) throw ValidationError("service radius must be positive");
  CoverageIndex index;
  index.radius_m = radius_m;
  index.demand_count = demand_xy.size();
  const KdTree2 tree(demand_xy);
  for (const CandidateSite& c : candidates) {
    index.site_ids.push_back(c.id);
    index.sigma.push_back(c.sigma);
    index.zone_ids.push_back(c.zone_id);
    std::vector<std::size_t> set;
    if (!tree.empty()) {
      for (std::size_t j : tree.within(c.xy, radius_m)) {
        // The tree prunes with the same squared test; re-check keeps the
        // contract independent of its traversal.
        if (within_band(c.xy, demand_xy[j], radius_m)) set.push_back(j);
      }
    }
    index.sets.push_back(std::move(set));
  }
  return index;
}

SelectionResult greedy_budget(const CoverageIndex& index, std::span<const double> demand, int budget,
                              const GreedyOptions& options) {
  if (budget < 0) throw ValidationError("site budget P must be >= 0");
  const auto limit = static_cast<std::size_t>(budget);
  return run_greedy(index, demand, options,
                    [&](const SelectionResult& r) { return r.steps.size() >= limit; });
}

double max_coverage_fraction(const CoverageIndex& index, std::span<const double> demand) {
  check_demand(index, demand);
  std::vector<bool> covered(index.demand_count, false);
  for (const auto& set : index.sets) {
    for (std::size_t j : set) covered[j] = true;
  }
  double total = 0.0, reached = 0.0;
  for (std::size_t j = 0; j < demand.size(); ++j) {
    total += demand[j];
    if (covered[j]) reached += demand[j];
  }
  return total > 0.0 ? reached / total : 1.0;
}

SelectionResult greedy_coverage(const CoverageIndex& index, std::span<const double> demand,
                                double alpha, const GreedyOptions& options) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError(fmt::format("coverage target alpha {} outside (0, 1]", alpha));
  }
  const double achievable = max_coverage_fraction(index, demand);
  if (achievable < alpha - kRelTol) {
    throw InfeasibleError(fmt::format(
        "coverage target {:.6f} is infeasible: candidates reach at most {:.6f} of demand", alpha,
        achievable));
  }
  SelectionResult result = run_greedy(index, demand, options, [&](const SelectionResult& r) {
    return r.covered_demand >= alpha * r.total_demand * (1.0 - kRelTol);
  });
  if (result.covered_demand < alpha * result.total_demand * (1.0 - kRelTol)) {
    throw InfeasibleError(fmt::format(
        "coverage target {:.6f} not reached under the per-zone cap (reached {:.6f})", alpha,
        result.coverage_fraction));
  }
  return result;
}

ZoneScoring score_zone_sites(std::span<const CandidateSite> candidates,
                             std::span<const double> coverage_estimate, double beta_cent,
                             double beta_cov) {
  if (!(beta_cent >= 0.0) || !(beta_cov >= 0.0) || beta_cent + beta_cov <= 0.0) {
    throw ValidationError("zone scoring weights must be non-negative and not both zero");
  }
  if (coverage_estimate.size() != candidates.size()) {
    throw ValidationError("one coverage estimate per candidate is required");
  }
  std::map<std::string, std::vector<std::size_t>> zones;
  for (std::size_t i = 0; i < candidates.size(); ++i) zones[candidates[i].zone_id];
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].excluded) zones[candidates[i].zone_id].push_back(i);
  }
  ZoneScoring out;
  for (const auto& [zone, members] : zones) {
    if (members.empty()) {
      out.skipped.push_back(zone);
      continue;
    }
    std::vector<double> cent, cov;
    for (std::size_t i : members) {
      cent.push_back(candidates[i].c_gnn);
      cov.push_back(coverage_estimate[i]);
    }
    const std::vector<double> cent_n = minmax_normalize(cent);
    const std::vector<double> cov_n = minmax_normalize(cov);
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const double score = beta_cent * cent_n[k] + beta_cov * cov_n[k];
      if (k == 0 || score > best_score ||
          (score == best_score && candidates[members[k]].id < candidates[members[best]].id)) {
        best = k;
        best_score = score;
      }
    }
    out.chosen.push_back({zone, candidates[members[best]].id, best_score});
  }
  return out;
}

}  // namespace evsite
