#include "evsite/hexgrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "evsite/errors.hpp"

namespace evsite {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

struct Bounds {
  double min_x, min_y, max_x, max_y;
};

HexIndex cube_round(double fq, double fr, int resolution) {
  const double fs = -fq - fr;
  double q = std::round(fq);
  double r = std::round(fr);
  const double s = std::round(fs);
  const double dq = std::abs(q - fq);
  const double dr = std::abs(r - fr);
  const double ds = std::abs(s - fs);
  if (dq > dr && dq > ds) {
    q = -r - s;
  } else if (dr > ds) {
    r = -q - s;
  }
  return {resolution, static_cast<std::int64_t>(q), static_cast<std::int64_t>(r)};
}

// Visits every lattice cell at `resolution` whose centroid may fall inside
// the planar box.
template <typename Fn>
void for_each_cell_in_box(const Bounds& box, int resolution, const GridSpec& spec, Fn&& fn) {
  const double s = spec.edge_length(resolution);
  const double row = 1.5 * s;
  const double col = kSqrt3 * s;
  const auto r_lo = static_cast<std::int64_t>(std::floor(box.min_y / row)) - 1;
  const auto r_hi = static_cast<std::int64_t>(std::ceil(box.max_y / row)) + 1;
  for (std::int64_t r = r_lo; r <= r_hi; ++r) {
    const double shift = static_cast<double>(r) / 2.0;
    const auto q_lo = static_cast<std::int64_t>(std::floor(box.min_x / col - shift)) - 1;
    const auto q_hi = static_cast<std::int64_t>(std::ceil(box.max_x / col - shift)) + 1;
    for (std::int64_t q = q_lo; q <= q_hi; ++q) {
      fn(HexIndex{resolution, q, r});
    }
  }
}

void sort_cells(std::vector<HexIndex>& cells) {
  std::sort(cells.begin(), cells.end());
}

}  // namespace

GridSpec::GridSpec()
    : GridSpec(LatLon{33.0, -84.0}, {14'000.0, 5'300.0, 2'000.0, 760.0, 600.0}) {}

GridSpec::GridSpec(LatLon origin, std::array<double, 5> edge_length_m, double meters_per_degree)
    : origin_(origin), edge_length_m_(edge_length_m) {
  if (!(std::abs(origin.lat) < 85.0) || !(std::abs(origin.lon) <= 180.0)) {
    throw ValidationError(fmt::format("grid origin out of range: ({}, {})", origin.lat, origin.lon));
  }
  for (std::size_t i = 0; i < edge_length_m_.size(); ++i) {
    if (!(edge_length_m_[i] > 0.0) || !std::isfinite(edge_length_m_[i])) {
      throw ValidationError(fmt::format("edge length for resolution {} must be positive",
                                        kMinResolution + static_cast<int>(i)));
    }
    if (i > 0 && !(edge_length_m_[i] < edge_length_m_[i - 1])) {
      throw ValidationError("edge lengths must strictly decrease with resolution");
    }
  }
  if (!(meters_per_degree > 0.0)) throw ValidationError("meters per degree must be positive");
  m_per_deg_lat_ = meters_per_degree;
  m_per_deg_lon_ = meters_per_degree * std::cos(origin.lat * std::numbers::pi / 180.0);
}

double GridSpec::edge_length(int resolution) const {
  check_resolution(resolution);
  return edge_length_m_[static_cast<std::size_t>(resolution - kMinResolution)];
}

Point2 GridSpec::project(LatLon p) const {
  return {(p.lon - origin_.lon) * m_per_deg_lon_, (p.lat - origin_.lat) * m_per_deg_lat_};
}

LatLon GridSpec::unproject(Point2 p) const {
  return {origin_.lat + p.y / m_per_deg_lat_, origin_.lon + p.x / m_per_deg_lon_};
}

void check_resolution(int resolution) {
  if (resolution < kMinResolution || resolution > kMaxResolution) {
    throw ValidationError(fmt::format("unsupported resolution {} (supported {}..{})", resolution,
                                      kMinResolution, kMaxResolution));
  }
}

double cell_area_m2(const GridSpec& spec, int resolution) {
  const double s = spec.edge_length(resolution);
  return 1.5 * kSqrt3 * s * s;
}

HexIndex planar_to_cell(Point2 p, int resolution, const GridSpec& spec) {
  const double s = spec.edge_length(resolution);
  const double fq = (kSqrt3 / 3.0 * p.x - p.y / 3.0) / s;
  const double fr = (2.0 / 3.0 * p.y) / s;
  return cube_round(fq, fr, resolution);
}

HexIndex point_to_cell(LatLon p, int resolution, const GridSpec& spec) {
  return planar_to_cell(spec.project(p), resolution, spec);
}

Point2 planar_centroid(const HexIndex& idx, const GridSpec& spec) {
  const double s = spec.edge_length(idx.resolution);
  const auto q = static_cast<double>(idx.q);
  const auto r = static_cast<double>(idx.r);
  return {s * kSqrt3 * (q + r / 2.0), s * 1.5 * r};
}

LatLon centroid(const HexIndex& idx, const GridSpec& spec) {
  return spec.unproject(planar_centroid(idx, spec));
}

std::array<Point2, 6> planar_boundary(const HexIndex& idx, const GridSpec& spec) {
  const Point2 c = planar_centroid(idx, spec);
  const double s = spec.edge_length(idx.resolution);
  std::array<Point2, 6> corners;
  for (int i = 0; i < 6; ++i) {
    const double angle = std::numbers::pi / 180.0 * (60.0 * i + 30.0);
    corners[static_cast<std::size_t>(i)] = {c.x + s * std::cos(angle), c.y + s * std::sin(angle)};
  }
  return corners;
}

std::vector<LatLon> boundary(const HexIndex& idx, const GridSpec& spec) {
  std::vector<LatLon> out;
  for (const Point2& p : planar_boundary(idx, spec)) out.push_back(spec.unproject(p));
  return out;
}

HexIndex parent(const HexIndex& idx, const GridSpec& spec) {
  check_resolution(idx.resolution);
  if (idx.resolution == kMinResolution) {
    throw ValidationError(fmt::format("resolution {} is already the coarsest", idx.resolution));
  }
  return planar_to_cell(planar_centroid(idx, spec), idx.resolution - 1, spec);
}

HexIndex ancestor(const HexIndex& idx, int resolution, const GridSpec& spec) {
  check_resolution(resolution);
  if (resolution > idx.resolution) {
    throw ValidationError(fmt::format("ancestor resolution {} is finer than {}", resolution,
                                      idx.resolution));
  }
  return planar_to_cell(planar_centroid(idx, spec), resolution, spec);
}

std::vector<HexIndex> descendants(const HexIndex& idx, int resolution, const GridSpec& spec) {
  check_resolution(idx.resolution);
  check_resolution(resolution);
  if (resolution <= idx.resolution) {
    throw ValidationError(fmt::format("descendant resolution {} must be finer than {}", resolution,
                                      idx.resolution));
  }
  const Point2 c = planar_centroid(idx, spec);
  const double s = spec.edge_length(idx.resolution);
  const Bounds box{c.x - s, c.y - s, c.x + s, c.y + s};
  std::vector<HexIndex> out;
  for_each_cell_in_box(box, resolution, spec, [&](const HexIndex& fine) {
    if (planar_to_cell(planar_centroid(fine, spec), idx.resolution, spec) == idx) {
      out.push_back(fine);
    }
  });
  sort_cells(out);
  return out;
}

std::vector<HexIndex> children(const HexIndex& idx, const GridSpec& spec) {
  check_resolution(idx.resolution);
  if (idx.resolution == kMaxResolution) {
    throw ValidationError(fmt::format("resolution {} is already the finest", idx.resolution));
  }
  return descendants(idx, idx.resolution + 1, spec);
}

std::vector<HexIndex> polyfill_planar(std::span<const Point2> ring, int resolution,
                                      const GridSpec& spec) {
  check_resolution(resolution);
  std::vector<Point2> pts(ring.begin(), ring.end());
  if (pts.size() >= 2 && pts.front().x == pts.back().x && pts.front().y == pts.back().y) {
    pts.pop_back();
  }
  if (pts.size() < 3) throw ValidationError("degenerate polygon: fewer than 3 vertices");
  Bounds box{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const Point2& p : pts) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  std::vector<HexIndex> out;
  for_each_cell_in_box(box, resolution, spec, [&](const HexIndex& cell) {
    if (point_in_polygon(planar_centroid(cell, spec), pts)) out.push_back(cell);
  });
  sort_cells(out);
  return out;
}

std::vector<HexIndex> polyfill(std::span<const LatLon> ring, int resolution, const GridSpec& spec) {
  std::vector<Point2> planar;
  planar.reserve(ring.size());
  for (const LatLon& p : ring) planar.push_back(spec.project(p));
  return polyfill_planar(planar, resolution, spec);
}

void validate_cell(const HexCell& cell) {
  check_resolution(cell.index.resolution);
  if (!(cell.population >= 0.0)) throw ValidationError("cell population must be >= 0");
  if (!(cell.poi_score >= 0.0)) throw ValidationError("cell poi_score must be >= 0");
  if (!(cell.ev_share >= 0.0 && cell.ev_share <= 1.0)) {
    throw ValidationError("cell ev_share must lie in [0, 1]");
  }
}

}  // namespace evsite
