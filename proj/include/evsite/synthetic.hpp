#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "evsite/geometry.hpp"
#include "evsite/hexgrid.hpp"
#include "evsite/roadgraph.hpp"

namespace evsite {

// Random geometric graph: n uniform points in a square of side `side_m`
// around `center`, linked when closer than the radius that gives roughly
// `mean_degree` neighbours. Only the largest connected component is kept.
RoadGraph random_geometric_graph(const std::string& zone_id, std::size_t n, Point2 center,
                                 double side_m, double mean_degree, std::mt19937_64& rng,
                                 const GridSpec& spec);

// Gabriel graph over uniform points: planar, mean degree near four, which
// looks much more like a street network than a radius graph does.
RoadGraph random_gabriel_graph(const std::string& zone_id, std::size_t n, Point2 center,
                               double side_m, std::mt19937_64& rng, const GridSpec& spec);

struct FixtureOptions {
  std::uint64_t seed = 7;
  int zones = 3;
  double zone_side_m = 12'500.0;
  std::size_t nodes_per_zone = 67;
  std::size_t pois = 400;
};

// Writes a complete pipeline input set (cells, zones, edges, POIs, counties,
// traffic, config.json) into `dir`.
void write_fixture(const std::filesystem::path& dir, const FixtureOptions& options,
                   const GridSpec& spec = GridSpec());

}  // namespace evsite
