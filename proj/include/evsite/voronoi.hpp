#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evsite/geometry.hpp"

namespace evsite {

struct Centroid {
  std::int64_t id = 0;
  Point2 xy;
  double weight = 0.0;  // demand weight used to pick repair locations
};

struct Hub {
  std::int64_t id = 0;
  Point2 xy;
  bool added = false;  // placed by the repair loop
  int min_ports = 5;
};

struct Reachability {
  std::int64_t centroid_id = 0;
  std::int64_t hub_id = 0;
  double distance_m = 0.0;
  bool violation = false;
};

struct ReachabilityReport {
  std::vector<Reachability> rows;  // same order as the input centroids
  double max_distance = 0.0;
  std::vector<std::int64_t> violations;
};

inline constexpr double kReachThresholdM = 30000.0;

// Euclidean nearest hub for each centroid; ties go to the lower hub id.
ReachabilityReport assign_nearest(std::span<const Centroid> centroids, std::span<const Hub> hubs,
                                  double threshold_m = kReachThresholdM);

// Adds hubs at violating centroids until every centroid is within the
// threshold. Picks the heaviest violator first (ties: farther, then lower id).
// New hub ids continue after the largest existing id. `hubs` may be empty.
std::vector<Hub> repair_coverage(std::span<const Centroid> centroids, std::span<const Hub> hubs,
                                 double threshold_m = kReachThresholdM, int min_ports = 5);

}  // namespace evsite
