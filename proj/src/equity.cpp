#include "evsite/equity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "evsite/errors.hpp"
#include "evsite/kdtree.hpp"

namespace evsite {

namespace {

// 53-bit uniform in [0, 1); std::uniform_real_distribution is not portable.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_radius(double r) {
  if (!(r > 0.0)) throw ValidationError("coverage radius must be > 0");
}

std::size_t count_within(std::span<const Point2> pts, std::span<const Point2> sites, double r) {
  if (sites.empty()) return 0;
  const KdTree2 tree(sites);
  std::size_t hit = 0;
  for (const Point2& p : pts) {
    if (distance_sq(p, sites[tree.nearest(p)]) <= r * r) ++hit;
  }
  return hit;
}

struct Box {
  double x0, y0, x1, y1;
};

Box bounds(std::span<const Point2> ring) {
  Box b{ring[0].x, ring[0].y, ring[0].x, ring[0].y};
  for (const Point2& p : ring) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

Point2 sample_in(std::span<const Point2> ring, const Box& b, std::mt19937_64& rng) {
  while (true) {
    const Point2 p{b.x0 + unit(rng) * (b.x1 - b.x0), b.y0 + unit(rng) * (b.y1 - b.y0)};
    if (point_in_polygon(p, ring)) return p;
  }
}

}  // namespace

double tile_coverage(std::span<const Point2> cell_xy, std::span<const Point2> sites,
                     double radius_m) {
  check_radius(radius_m);
  if (cell_xy.empty()) throw ValidationError("tile coverage needs at least one cell");
  return static_cast<double>(count_within(cell_xy, sites, radius_m)) /
         static_cast<double>(cell_xy.size());
}

std::vector<Point2> sample_cells(std::span<const HexIndex> cells, const GridSpec& spec,
                                 std::size_t samples, std::uint64_t seed) {
  if (cells.empty()) throw ValidationError("area sampling needs at least one cell");
  for (const HexIndex& c : cells) {
    if (c.resolution != cells.front().resolution) {
      throw ValidationError("area sampling needs cells of one resolution");
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<Point2> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto k = static_cast<std::size_t>(unit(rng) * static_cast<double>(cells.size()));
    const std::array<Point2, 6> hex = planar_boundary(cells[std::min(k, cells.size() - 1)], spec);
    out.push_back(sample_in(hex, bounds(hex), rng));
  }
  return out;
}

std::vector<Point2> sample_polygon(std::span<const Point2> ring, std::size_t samples,
                                   std::uint64_t seed) {
  if (ring.size() < 3) throw ValidationError("sampling polygon needs at least 3 vertices");
  if (!(std::abs(polygon_area(ring)) > 0.0)) throw ValidationError("sampling polygon has no area");
  std::mt19937_64 rng(seed);
  const Box b = bounds(ring);
  std::vector<Point2> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) out.push_back(sample_in(ring, b, rng));
  return out;
}

double area_fraction(std::span<const Point2> samples, std::span<const Point2> sites,
                     double radius_m) {
  check_radius(radius_m);
  if (samples.empty()) return 0.0;
  return static_cast<double>(count_within(samples, sites, radius_m)) /
         static_cast<double>(samples.size());
}

CoverageMetrics coverage_metrics(std::span<const HexIndex> cells, std::span<const Point2> sites,
                                 double radius_m, const GridSpec& spec, std::size_t samples,
                                 std::uint64_t seed) {
  check_radius(radius_m);
  if (cells.empty()) throw ValidationError("coverage metrics need at least one cell");
  std::vector<Point2> xy;
  xy.reserve(cells.size());
  for (const HexIndex& c : cells) xy.push_back(planar_centroid(c, spec));
  const std::vector<Point2> pts = sample_cells(cells, spec, samples, seed);
  return {radius_m, tile_coverage(xy, sites, radius_m), area_fraction(pts, sites, radius_m)};
}

EquityReport equity_report(std::span<const EquityCell> cells, std::span<const Point2> sites) {
  if (sites.empty()) throw ValidationError("equity report needs at least one site");
  EquityReport out;
  for (const EquityCell& c : cells) {
    if (!(c.population >= 0.0)) throw ValidationError("cell population must be >= 0");
    out.total_population += c.population;
  }
  if (!(out.total_population > 0.0)) {
    throw ValidationError("equity report needs a positive total population");
  }
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cells[a].median_income < cells[b].median_income;
  });

  const KdTree2 tree(sites);
  const double third = out.total_population / 3.0;
  std::array<double, 3> pop{}, weighted{};
  double cum = 0.0;
  for (std::size_t i : order) {
    const EquityCell& c = cells[i];
    const double d = distance(c.xy, sites[tree.nearest(c.xy)]);
    double lo = cum;
    const double hi = cum + c.population;
    for (int t = 0; t < 3 && lo < hi; ++t) {
      const double edge = t == 2 ? hi : std::min(hi, third * (t + 1));
      if (edge <= lo) continue;
      pop[t] += edge - lo;
      weighted[t] += (edge - lo) * d;
      lo = edge;
    }
    cum = hi;
  }
  auto mean = [&](int t) { return pop[t] > 0.0 ? weighted[t] / pop[t] : 0.0; };
  out.low = mean(0);
  out.mid = mean(1);
  out.high = mean(2);
  out.gap = out.low - out.high;
  return out;
}

}  // namespace evsite
