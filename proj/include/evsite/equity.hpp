#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evsite/geometry.hpp"
#include "evsite/hexgrid.hpp"

namespace evsite {

struct CoverageMetrics {
  double radius_m = 0.0;
  double tile_coverage = 0.0;
  double area_coverage = 0.0;
};

// Fraction of cell centroids within `radius_m` of some site. No sites → 0.
double tile_coverage(std::span<const Point2> cell_xy, std::span<const Point2> sites,
                     double radius_m);

// Uniform samples over the union of same-resolution hexagons, or over a
// polygon. Seeded and platform-independent.
std::vector<Point2> sample_cells(std::span<const HexIndex> cells, const GridSpec& spec,
                                 std::size_t samples, std::uint64_t seed);
std::vector<Point2> sample_polygon(std::span<const Point2> ring, std::size_t samples,
                                   std::uint64_t seed);

// Share of samples within `radius_m` of some site.
double area_fraction(std::span<const Point2> samples, std::span<const Point2> sites,
                     double radius_m);

inline constexpr std::size_t kAreaSamples = 100000;

CoverageMetrics coverage_metrics(std::span<const HexIndex> cells, std::span<const Point2> sites,
                                 double radius_m, const GridSpec& spec,
                                 std::size_t samples = kAreaSamples, std::uint64_t seed = 1);

struct EquityCell {
  Point2 xy;
  double population = 0.0;
  double median_income = 0.0;
};

struct EquityReport {
  double low = 0.0;   // population-weighted mean nearest-site distance, metres
  double mid = 0.0;
  double high = 0.0;
  double gap = 0.0;   // low − high
  double total_population = 0.0;
};

// Residents are ordered by cell income and split into population thirds; a
// cell straddling a boundary contributes its population fractionally.
EquityReport equity_report(std::span<const EquityCell> cells, std::span<const Point2> sites);

}  // namespace evsite
