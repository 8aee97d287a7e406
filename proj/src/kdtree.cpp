#include "evsite/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace evsite {

namespace {

double coord(Point2 p, int axis) { return axis == 0 ? p.x : p.y; }

}  // namespace

KdTree2::KdTree2(std::span<const Point2> points) : points_(points.begin(), points.end()) {
  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  nodes_.reserve(points_.size());
  root_ = build(order, 0, order.size(), 0);
}

int KdTree2::build(std::vector<std::size_t>& order, std::size_t lo, std::size_t hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 2;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(lo),
                   order.begin() + static_cast<std::ptrdiff_t>(mid),
                   order.begin() + static_cast<std::ptrdiff_t>(hi),
                   [&](std::size_t a, std::size_t b) {
                     const double ca = coord(points_[a], axis);
                     const double cb = coord(points_[b], axis);
                     return ca < cb || (ca == cb && a < b);
                   });
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({order[mid], axis});
  const int left = build(order, lo, mid, depth + 1);
  const int right = build(order, mid + 1, hi, depth + 1);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

std::vector<std::size_t> KdTree2::within(Point2 center, double radius) const {
  std::vector<std::size_t> out;
  if (radius < 0.0) return out;
  within_impl(root_, center, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree2::within_impl(int node, Point2 c, double r2, std::vector<std::size_t>& out) const {
  if (node < 0) return;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const Point2 p = points_[n.point];
  if (distance_sq(p, c) <= r2) out.push_back(n.point);
  const double diff = coord(c, n.axis) - coord(p, n.axis);
  const int near = diff <= 0.0 ? n.left : n.right;
  const int far = diff <= 0.0 ? n.right : n.left;
  within_impl(near, c, r2, out);
  // Points equal to the split value may sit on either side.
  if (diff * diff <= r2) within_impl(far, c, r2, out);
}

std::size_t KdTree2::nearest(Point2 query) const {
  std::size_t best = points_.size();
  double best_d2 = 0.0;
  nearest_impl(root_, query, best, best_d2);
  return best;
}

void KdTree2::nearest_impl(int node, Point2 q, std::size_t& best, double& best_d2) const {
  if (node < 0) return;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const Point2 p = points_[n.point];
  const double d2 = distance_sq(p, q);
  if (best == points_.size() || d2 < best_d2 || (d2 == best_d2 && n.point < best)) {
    best = n.point;
    best_d2 = d2;
  }
  const double diff = coord(q, n.axis) - coord(p, n.axis);
  const int near = diff <= 0.0 ? n.left : n.right;
  const int far = diff <= 0.0 ? n.right : n.left;
  nearest_impl(near, q, best, best_d2);
  if (diff * diff <= best_d2) nearest_impl(far, q, best, best_d2);
}

}  // namespace evsite
