#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evsite/hexgrid.hpp"

namespace evsite {

// The six canonical POI classes in priority order (rank 1 first).
inline constexpr std::array<std::string_view, 6> kPoiClasses = {
    "commercial-retail", "parking",           "transport-hub",
    "workplace",         "government-public", "residential",
};

struct PoiRecord {
  std::string record_id;  // e.g. "pois.csv:17"
  LatLon location;
  std::string canonical_class;
  int count = 1;
};

// Weight per canonical class.
class PoiWeightTable {
 public:
  // w = 7 − rank, so commercial-retail weighs 6 and residential 1.
  static PoiWeightTable defaults();

  explicit PoiWeightTable(std::map<std::string, double> weights);

  // Throws ValidationError naming `record_id` for an unknown class.
  double weight(const std::string& canonical_class, const std::string& record_id = "") const;
  const std::map<std::string, double>& weights() const { return weights_; }

 private:
  std::map<std::string, double> weights_;
};

bool is_poi_class(std::string_view name);

// π_c = Σ_m w_m · count_{c,m} for each of `cells` (all at one resolution).
// POIs outside every listed cell are ignored.
std::vector<double> poi_score(std::span<const HexIndex> cells, std::span<const PoiRecord> pois,
                              const PoiWeightTable& table, const GridSpec& spec);

struct DemandPoint {
  std::size_t id = 0;
  HexIndex cell;
  LatLon location;
  double p_norm = 0.0;
  double s_norm = 0.0;
  double weight = 0.0;
};

struct DemandBuild {
  std::vector<DemandPoint> points;
  std::size_t orphans = 0;
};

// Demand points at the fine cells' centroids. Population and POI score come
// from the containing cell at `parent_resolution` (looked up in
// `parent_features`), are min-max normalised over all points, then combined
// as d = w_pop·p̃ + w_poi·s̃. Fine cells with no parent features are dropped
// and counted.
DemandBuild build_demand_points(std::span<const HexIndex> fine_cells,
                                const std::map<HexIndex, HexCell>& parent_features,
                                int parent_resolution, double w_pop, double w_poi,
                                const GridSpec& spec);

// Optional equity up-weight: demand in cells whose income is below the
// median of `incomes` is multiplied by `factor`. factor = 1 is a no-op.
std::vector<double> income_uplift(std::span<const double> weights, std::span<const double> incomes,
                                  double factor);

}  // namespace evsite
