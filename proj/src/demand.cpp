#include "evsite/demand.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "evsite/errors.hpp"
#include "evsite/roadgraph.hpp"

namespace evsite {

bool is_poi_class(std::string_view name) {
  return std::find(kPoiClasses.begin(), kPoiClasses.end(), name) != kPoiClasses.end();
}

PoiWeightTable PoiWeightTable::defaults() {
  std::map<std::string, double> w;
  for (std::size_t rank = 1; rank <= kPoiClasses.size(); ++rank) {
    w.emplace(std::string(kPoiClasses[rank - 1]), 7.0 - static_cast<double>(rank));
  }
  return PoiWeightTable(std::move(w));
}

PoiWeightTable::PoiWeightTable(std::map<std::string, double> weights) : weights_(std::move(weights)) {
  for (const auto& [name, w] : weights_) {
    if (!is_poi_class(name)) throw ValidationError(fmt::format("unknown POI class '{}'", name));
    if (!(w > 0.0)) throw ValidationError(fmt::format("POI weight for '{}' must be > 0", name));
  }
  for (std::string_view name : kPoiClasses) {
    if (!weights_.contains(std::string(name))) {
      throw ValidationError(fmt::format("POI weight table is missing class '{}'", name));
    }
  }
}

double PoiWeightTable::weight(const std::string& canonical_class, const std::string& record_id) const {
  const auto it = weights_.find(canonical_class);
  if (it == weights_.end()) {
    throw ValidationError(fmt::format("{}: unknown canonical class '{}'",
                                      record_id.empty() ? "POI" : record_id, canonical_class));
  }
  return it->second;
}

std::vector<double> poi_score(std::span<const HexIndex> cells, std::span<const PoiRecord> pois,
                              const PoiWeightTable& table, const GridSpec& spec) {
  std::vector<double> scores(cells.size(), 0.0);
  if (cells.empty()) return scores;
  const int res = cells.front().resolution;
  std::unordered_map<HexIndex, std::size_t, HexIndexHash> slot;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].resolution != res) {
      throw ValidationError("poi_score: cells must share one resolution");
    }
    slot.emplace(cells[i], i);
  }
  for (const PoiRecord& poi : pois) {
    const double w = table.weight(poi.canonical_class, poi.record_id);
    if (poi.count < 1) {
      throw ValidationError(fmt::format("{}: POI count must be >= 1", poi.record_id));
    }
    const auto it = slot.find(point_to_cell(poi.location, res, spec));
    if (it != slot.end()) scores[it->second] += w * poi.count;
  }
  return scores;
}

DemandBuild build_demand_points(std::span<const HexIndex> fine_cells,
                                const std::map<HexIndex, HexCell>& parent_features,
                                int parent_resolution, double w_pop, double w_poi,
                                const GridSpec& spec) {
  if (!(w_pop >= 0.0) || !(w_poi >= 0.0)) {
    throw ValidationError("demand weights must be non-negative");
  }
  DemandBuild out;
  std::vector<double> pop;
  std::vector<double> poi;
  for (const HexIndex& cell : fine_cells) {
    const auto it = parent_features.find(ancestor(cell, parent_resolution, spec));
    if (it == parent_features.end()) {
      ++out.orphans;
      continue;
    }
    DemandPoint p;
    p.id = out.points.size();
    p.cell = cell;
    p.location = centroid(cell, spec);
    out.points.push_back(p);
    pop.push_back(it->second.population);
    poi.push_back(it->second.poi_score);
  }
  const std::vector<double> p_norm = minmax_normalize(pop);
  const std::vector<double> s_norm = minmax_normalize(poi);
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    out.points[i].p_norm = p_norm[i];
    out.points[i].s_norm = s_norm[i];
    out.points[i].weight = w_pop * p_norm[i] + w_poi * s_norm[i];
  }
  return out;
}

std::vector<double> income_uplift(std::span<const double> weights, std::span<const double> incomes,
                                  double factor) {
  if (weights.size() != incomes.size()) {
    throw ValidationError("income_uplift: weights and incomes differ in length");
  }
  if (!(factor >= 1.0)) throw ValidationError("income uplift factor must be >= 1");
  std::vector<double> out(weights.begin(), weights.end());
  if (factor == 1.0 || incomes.empty()) return out;
  std::vector<double> sorted(incomes.begin(), incomes.end());
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double median = *mid;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (incomes[i] < median) out[i] *= factor;
  }
  return out;
}

}  // namespace evsite
