#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "evsite/geometry.hpp"

namespace evsite {

inline constexpr int kMinResolution = 6;
inline constexpr int kMaxResolution = 10;

// Cell address on a pointy-top axial hex lattice at one resolution.
struct HexIndex {
  int resolution = kMinResolution;
  std::int64_t q = 0;
  std::int64_t r = 0;

  friend auto operator<=>(const HexIndex&, const HexIndex&) = default;
};

struct HexIndexHash {
  std::size_t operator()(const HexIndex& h) const noexcept {
    std::size_t seed = std::hash<int>{}(h.resolution);
    seed ^= std::hash<std::int64_t>{}(h.q) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    seed ^= std::hash<std::int64_t>{}(h.r) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
};

// Lattice geometry plus the local equirectangular projection that maps
// lat/lon to planar meters around `origin`.
class GridSpec {
 public:
  static constexpr double kDefaultMetersPerDegree = 111'320.0;

  GridSpec();
  GridSpec(LatLon origin, std::array<double, 5> edge_length_m,
           double meters_per_degree = kDefaultMetersPerDegree);

  LatLon origin() const { return origin_; }
  double edge_length(int resolution) const;
  const std::array<double, 5>& edge_lengths() const { return edge_length_m_; }
  double meters_per_degree_lat() const { return m_per_deg_lat_; }
  double meters_per_degree_lon() const { return m_per_deg_lon_; }

  Point2 project(LatLon p) const;
  LatLon unproject(Point2 p) const;

 private:
  LatLon origin_;
  std::array<double, 5> edge_length_m_;
  double m_per_deg_lat_;
  double m_per_deg_lon_;
};

void check_resolution(int resolution);

// Regular hexagon area in the projected plane: (3√3/2)·edge².
double cell_area_m2(const GridSpec& spec, int resolution);

HexIndex planar_to_cell(Point2 p, int resolution, const GridSpec& spec);
HexIndex point_to_cell(LatLon p, int resolution, const GridSpec& spec);

Point2 planar_centroid(const HexIndex& idx, const GridSpec& spec);
LatLon centroid(const HexIndex& idx, const GridSpec& spec);

// Six corners counter-clockwise, planar meters.
std::array<Point2, 6> planar_boundary(const HexIndex& idx, const GridSpec& spec);
std::vector<LatLon> boundary(const HexIndex& idx, const GridSpec& spec);

HexIndex parent(const HexIndex& idx, const GridSpec& spec);

// Finer cells (one level down) whose centroids fall inside idx's hexagon,
// sorted by (q, r).
std::vector<HexIndex> children(const HexIndex& idx, const GridSpec& spec);

// Cells at `resolution` (any finer level) whose centroids fall inside idx's
// hexagon, assigned by the centroid rule at idx's own resolution.
std::vector<HexIndex> descendants(const HexIndex& idx, int resolution, const GridSpec& spec);

// Cell at a coarser `resolution` containing idx's centroid.
HexIndex ancestor(const HexIndex& idx, int resolution, const GridSpec& spec);

// Cells whose centroids fall inside the ring (lat/lon, implicitly or
// explicitly closed). Sorted by (q, r).
std::vector<HexIndex> polyfill(std::span<const LatLon> ring, int resolution, const GridSpec& spec);
std::vector<HexIndex> polyfill_planar(std::span<const Point2> ring, int resolution,
                                      const GridSpec& spec);

// Aggregated features of one cell.
struct HexCell {
  HexIndex index;
  LatLon centroid;
  double population = 0.0;
  double poi_score = 0.0;
  double median_income = 0.0;
  double ev_share = 0.0;
  std::string zone_id;
};

void validate_cell(const HexCell& cell);

}  // namespace evsite
