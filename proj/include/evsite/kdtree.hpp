#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evsite/geometry.hpp"

namespace evsite {

// Static 2-d tree over planar points. Queries return indices into the
// original point array.
class KdTree2 {
 public:
  KdTree2() = default;
  explicit KdTree2(std::span<const Point2> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  // All points with distance <= radius, ascending index order.
  std::vector<std::size_t> within(Point2 center, double radius) const;

  // Nearest point; equal distances resolve to the lower index.
  // Precondition: !empty().
  std::size_t nearest(Point2 query) const;

 private:
  struct Node {
    std::size_t point;  // index into points_
    int axis;
    int left = -1;
    int right = -1;
  };

  int build(std::vector<std::size_t>& order, std::size_t lo, std::size_t hi, int depth);
  void within_impl(int node, Point2 c, double r2, std::vector<std::size_t>& out) const;
  void nearest_impl(int node, Point2 q, std::size_t& best, double& best_d2) const;

  std::vector<Point2> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace evsite
