#include "evsite/voronoi.hpp"

#include <algorithm>
#include <numeric>

#include "evsite/errors.hpp"
#include "evsite/kdtree.hpp"

namespace evsite {

ReachabilityReport assign_nearest(std::span<const Centroid> centroids, std::span<const Hub> hubs,
                                  double threshold_m) {
  if (hubs.empty()) throw ValidationError("nearest-hub assignment needs at least one hub");
  if (!(threshold_m > 0.0)) throw ValidationError("reachability threshold must be > 0");
  // Order hubs by id so the tree's lower-index tie rule is the lower-id rule.
  std::vector<std::size_t> order(hubs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return hubs[a].id < hubs[b].id; });
  std::vector<Point2> pts;
  pts.reserve(hubs.size());
  for (std::size_t i : order) pts.push_back(hubs[i].xy);
  const KdTree2 tree(pts);

  ReachabilityReport report;
  report.rows.reserve(centroids.size());
  for (const Centroid& c : centroids) {
    const Hub& h = hubs[order[tree.nearest(c.xy)]];
    Reachability row{c.id, h.id, distance(c.xy, h.xy), false};
    row.violation = row.distance_m > threshold_m;
    if (row.violation) report.violations.push_back(c.id);
    report.max_distance = std::max(report.max_distance, row.distance_m);
    report.rows.push_back(row);
  }
  return report;
}

std::vector<Hub> repair_coverage(std::span<const Centroid> centroids, std::span<const Hub> hubs,
                                 double threshold_m, int min_ports) {
  if (!(threshold_m > 0.0)) throw ValidationError("reachability threshold must be > 0");
  std::vector<Hub> all(hubs.begin(), hubs.end());
  std::vector<Hub> added;
  std::int64_t next_id = 0;
  for (const Hub& h : hubs) next_id = std::max(next_id, h.id + 1);

  while (true) {
    std::size_t pick = centroids.size();
    double pick_dist = 0.0;
    if (all.empty()) {
      // No hubs at all: every centroid is a violation at infinite distance.
      for (std::size_t i = 0; i < centroids.size(); ++i) {
        if (pick == centroids.size() || centroids[i].weight > centroids[pick].weight ||
            (centroids[i].weight == centroids[pick].weight && centroids[i].id < centroids[pick].id)) {
          pick = i;
        }
      }
    } else {
      const ReachabilityReport r = assign_nearest(centroids, all, threshold_m);
      for (std::size_t i = 0; i < centroids.size(); ++i) {
        if (!r.rows[i].violation) continue;
        const double d = r.rows[i].distance_m;
        const Centroid& c = centroids[i];
        if (pick == centroids.size() || c.weight > centroids[pick].weight ||
            (c.weight == centroids[pick].weight &&
             (d > pick_dist || (d == pick_dist && c.id < centroids[pick].id)))) {
          pick = i;
          pick_dist = d;
        }
      }
    }
    if (pick == centroids.size()) break;
    Hub h{next_id++, centroids[pick].xy, true, min_ports};
    all.push_back(h);
    added.push_back(h);
  }
  return added;
}

}  // namespace evsite
