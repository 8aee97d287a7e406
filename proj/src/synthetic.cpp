#include "evsite/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace evsite {

namespace {

RoadGraph largest_component(const std::string& zone_id, const std::vector<Point2>& pts,
                            const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                            const GridSpec& spec) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> comp(n, n);
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::size_t best_comp = 0, best_size = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != n) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = s;
    std::size_t size = 0;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      ++size;
      for (std::size_t w : adj[v]) {
        if (comp[w] == n) {
          comp[w] = s;
          stack.push_back(w);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_comp = s;
    }
  }
  std::vector<std::size_t> remap(n, n);
  std::vector<Point2> kept_pts;
  for (std::size_t v = 0; v < n; ++v) {
    if (comp[v] == best_comp) {
      remap[v] = kept_pts.size();
      kept_pts.push_back(pts[v]);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> kept_edges;
  for (auto [a, b] : edges) {
    if (remap[a] != n && remap[b] != n) kept_edges.emplace_back(remap[a], remap[b]);
  }
  return graph_from_edges(zone_id, kept_pts, kept_edges, spec);
}

std::vector<Point2> uniform_points(std::size_t n, Point2 center, double side_m,
                                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-side_m / 2.0, side_m / 2.0);
  std::vector<Point2> pts(n);
  for (Point2& p : pts) p = {center.x + coord(rng), center.y + coord(rng)};
  return pts;
}

}  // namespace

RoadGraph random_geometric_graph(const std::string& zone_id, std::size_t n, Point2 center,
                                 double side_m, double mean_degree, std::mt19937_64& rng,
                                 const GridSpec& spec) {
  const std::vector<Point2> pts = uniform_points(n, center, side_m, rng);

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  // Expected degree ≈ n·π·r²/side², ignoring boundary effects.
  const double radius =
      side_m * std::sqrt(mean_degree / (std::numbers::pi * static_cast<double>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(pts[i], pts[j]) <= radius) edges.emplace_back(i, j);
    }
  }
  return largest_component(zone_id, pts, edges, spec);
}

RoadGraph random_gabriel_graph(const std::string& zone_id, std::size_t n, Point2 center,
                               double side_m, std::mt19937_64& rng, const GridSpec& spec) {
  const std::vector<Point2> pts = uniform_points(n, center, side_m, rng);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  // i–j linked when no third point lies strictly inside the circle on
  // diameter ij.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 mid{(pts[i].x + pts[j].x) / 2.0, (pts[i].y + pts[j].y) / 2.0};
      const double r2 = distance_sq(pts[i], pts[j]) / 4.0;
      bool empty = true;
      for (std::size_t k = 0; k < n && empty; ++k) {
        if (k != i && k != j && distance_sq(pts[k], mid) < r2) empty = false;
      }
      if (empty) edges.emplace_back(i, j);
    }
  }
  return largest_component(zone_id, pts, edges, spec);
}

}  // namespace evsite
