#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evsite/geometry.hpp"
#include "evsite/hexgrid.hpp"

namespace evsite {

// One row of the edge-list CSV.
struct EdgeRecord {
  std::string zone_id;
  std::string node_a;
  std::string node_b;
  LatLon a;
  LatLon b;
};

struct RoadNode {
  std::string id;
  LatLon location;
  Point2 xy;
  int degree = 0;
};

struct RoadEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length_m = 0.0;
};

// Undirected intersection graph of one zone. Node order is the order of
// first appearance in the edge records, which keeps every downstream output
// deterministic.
class RoadGraph {
 public:
  RoadGraph() = default;
  RoadGraph(std::string zone_id, std::vector<RoadNode> nodes, std::vector<RoadEdge> edges);

  const std::string& zone_id() const { return zone_id_; }
  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }

  // Neighbour lists as (node, edge index) pairs.
  const std::vector<std::pair<std::size_t, std::size_t>>& neighbors(std::size_t v) const {
    return adjacency_[v];
  }

 private:
  std::string zone_id_;
  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency_;
};

// Clips the edge list to the zone polygon: an edge survives only when both
// endpoints lie inside. Self-loops and duplicate edges are dropped.
// Throws ValidationError when nothing survives.
RoadGraph build_graph(const std::string& zone_id, std::span<const LatLon> zone_polygon,
                      std::span<const EdgeRecord> edges, const GridSpec& spec);

// Graph from planar coordinates and index pairs; used by synthetic generators.
RoadGraph graph_from_edges(const std::string& zone_id, std::span<const Point2> positions,
                           std::span<const std::pair<std::size_t, std::size_t>> edges,
                           const GridSpec& spec);

enum class PathMetric { kHops, kLength };

// Hop-count Brandes accumulation over any field type; instantiated with
// double in production and with exact rationals in tests.
template <typename Scalar>
std::vector<Scalar> brandes_hops(const RoadGraph& g) {
  const std::size_t n = g.size();
  std::vector<Scalar> centrality(n, Scalar(0));
  std::vector<Scalar> sigma(n);
  std::vector<Scalar> delta(n);
  std::vector<long> dist(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::size_t> order;
  std::vector<std::size_t> frontier;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), Scalar(0));
    std::fill(delta.begin(), delta.end(), Scalar(0));
    std::fill(dist.begin(), dist.end(), -1L);
    for (auto& p : preds) p.clear();
    order.clear();
    sigma[s] = Scalar(1);
    dist[s] = 0;
    frontier.assign(1, s);
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const std::size_t v = frontier[head];
      order.push_back(v);
      for (auto [w, e] : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          frontier.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (Scalar(1) + delta[w]);
      if (w != s) centrality[w] += delta[w];
    }
  }
  // Each unordered pair was accumulated from both endpoints.
  for (auto& c : centrality) c /= Scalar(2);
  return centrality;
}

// Raw shortest-path betweenness (unordered source/target pairs, endpoints
// excluded) via Brandes' dependency accumulation.
std::vector<double> betweenness_raw(const RoadGraph& g, PathMetric metric = PathMetric::kHops);

// Maps min to 0 and max to 1; a constant vector maps to all zeros.
std::vector<double> minmax_normalize(std::span<const double> values);

// Zone-normalised betweenness in [0, 1].
std::vector<double> betweenness(const RoadGraph& g, PathMetric metric = PathMetric::kHops);

}  // namespace evsite
