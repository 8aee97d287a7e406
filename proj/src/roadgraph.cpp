#include "evsite/roadgraph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "evsite/errors.hpp"

namespace evsite {

RoadGraph::RoadGraph(std::string zone_id, std::vector<RoadNode> nodes, std::vector<RoadEdge> edges)
    : zone_id_(std::move(zone_id)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  adjacency_.resize(nodes_.size());
  for (RoadNode& n : nodes_) n.degree = 0;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const RoadEdge& edge = edges_[e];
    if (edge.a >= nodes_.size() || edge.b >= nodes_.size()) {
      throw ValidationError(fmt::format("zone {}: edge {} references a missing node", zone_id_, e));
    }
    if (edge.a == edge.b) {
      throw ValidationError(fmt::format("zone {}: self-loop at node {}", zone_id_, nodes_[edge.a].id));
    }
    adjacency_[edge.a].emplace_back(edge.b, e);
    adjacency_[edge.b].emplace_back(edge.a, e);
    ++nodes_[edge.a].degree;
    ++nodes_[edge.b].degree;
  }
}

RoadGraph build_graph(const std::string& zone_id, std::span<const LatLon> zone_polygon,
                      std::span<const EdgeRecord> edges, const GridSpec& spec) {
  std::vector<Point2> ring;
  for (const LatLon& p : zone_polygon) ring.push_back(spec.project(p));
  if (ring.size() >= 2 && ring.front().x == ring.back().x && ring.front().y == ring.back().y) {
    ring.pop_back();
  }
  if (ring.size() < 3) {
    throw ValidationError(fmt::format("zone {}: polygon has fewer than 3 vertices", zone_id));
  }

  std::vector<RoadNode> nodes;
  std::unordered_map<std::string, std::size_t> node_index;
  std::vector<RoadEdge> kept;
  std::set<std::pair<std::size_t, std::size_t>> seen;

  auto intern = [&](const std::string& id, LatLon where, Point2 xy) {
    auto [it, inserted] = node_index.try_emplace(id, nodes.size());
    if (inserted) nodes.push_back({id, where, xy, 0});
    return it->second;
  };

  for (const EdgeRecord& rec : edges) {
    if (rec.zone_id != zone_id) continue;
    if (rec.node_a == rec.node_b) continue;
    const Point2 pa = spec.project(rec.a);
    const Point2 pb = spec.project(rec.b);
    if (!point_in_polygon(pa, ring) || !point_in_polygon(pb, ring)) continue;
    const std::size_t a = intern(rec.node_a, rec.a, pa);
    const std::size_t b = intern(rec.node_b, rec.b, pb);
    if (!seen.insert(std::minmax(a, b)).second) continue;
    kept.push_back({a, b, distance(nodes[a].xy, nodes[b].xy)});
  }
  if (nodes.empty()) {
    throw ValidationError(fmt::format("zone {}: no road edges inside the zone polygon", zone_id));
  }
  return RoadGraph(zone_id, std::move(nodes), std::move(kept));
}

RoadGraph graph_from_edges(const std::string& zone_id, std::span<const Point2> positions,
                           std::span<const std::pair<std::size_t, std::size_t>> edges,
                           const GridSpec& spec) {
  std::vector<RoadNode> nodes;
  nodes.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    nodes.push_back({fmt::format("{}", i), spec.unproject(positions[i]), positions[i], 0});
  }
  std::vector<RoadEdge> out;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [a, b] : edges) {
    if (a == b || !seen.insert(std::minmax(a, b)).second) continue;
    out.push_back({a, b, distance(positions[a], positions[b])});
  }
  return RoadGraph(zone_id, std::move(nodes), std::move(out));
}

std::vector<double> betweenness_raw(const RoadGraph& g, PathMetric metric) {
  if (metric == PathMetric::kHops) return brandes_hops<double>(g);

  const std::size_t n = g.size();
  std::vector<double> centrality(n, 0.0);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<double> dist(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::size_t> stack;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  using Item = std::pair<double, std::size_t>;

  for (std::size_t s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), kInf);
    for (auto& p : preds) p.clear();
    stack.clear();
    sigma[s] = 1.0;
    dist[s] = 0.0;

    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<bool> settled(n, false);
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (settled[v] || d > dist[v]) continue;
      settled[v] = true;
      stack.push_back(v);
      for (auto [w, e] : g.neighbors(v)) {
        const double candidate = dist[v] + g.edges()[e].length_m;
        if (candidate < dist[w]) {
          dist[w] = candidate;
          sigma[w] = sigma[v];
          preds[w].assign(1, v);
          heap.emplace(candidate, w);
        } else if (candidate == dist[w] && !settled[w]) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }

    while (!stack.empty()) {
      const std::size_t w = stack.back();
      stack.pop_back();
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) centrality[w] += delta[w];
    }
  }
  for (double& c : centrality) c /= 2.0;
  return centrality;
}

std::vector<double> minmax_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
  return out;
}

std::vector<double> betweenness(const RoadGraph& g, PathMetric metric) {
  if (g.size() == 0) throw ValidationError("betweenness of an empty graph");
  const std::vector<double> raw = betweenness_raw(g, metric);
  return minmax_normalize(raw);
}

}  // namespace evsite
