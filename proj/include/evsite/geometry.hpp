#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace evsite {

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

// Planar coordinates in meters on the local projection.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double distance_sq(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Even-odd ray casting. Points exactly on an edge may land on either side.
bool point_in_polygon(Point2 p, std::span<const Point2> ring);

// Absolute area of a simple polygon (shoelace).
double polygon_area(std::span<const Point2> ring);

}  // namespace evsite
