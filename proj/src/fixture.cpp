// Synthetic input set for end-to-end runs: three square zones in a row, each
// with a Gabriel road graph, plus cells, POIs, counties and hourly traffic.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "evsite/demand.hpp"
#include "evsite/errors.hpp"
#include "evsite/io.hpp"
#include "evsite/synthetic.hpp"

namespace evsite {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

struct FixtureCounty {
  const char* id;
  double ev;
  double vehicles;
  double share_2024;
  double share_2025;
  double wage;
};

constexpr FixtureCounty kCounties[] = {
    {"C1", 4000.0, 100000.0, 0.035, 0.04, 31.5},
    {"C2", 1500.0, 60000.0, 0.022, 0.025, 24.0},
};

constexpr const char* kAreaTypes[] = {"urban", "suburban", "rural"};

}  // namespace

void write_fixture(const std::filesystem::path& dir, const FixtureOptions& options,
                   const GridSpec& spec) {
  if (options.zones < 1) throw ValidationError("fixture needs at least one zone");
  std::mt19937_64 rng(options.seed);
  const double side = options.zone_side_m;
  const double span = side * options.zones;

  struct ZoneInfo {
    std::string id;
    std::string county;
    std::string area_type;
    Point2 center;
    std::vector<Point2> ring;
  };
  std::vector<ZoneInfo> zones;
  for (int z = 0; z < options.zones; ++z) {
    ZoneInfo info;
    info.id = fmt::format("Z{}", z + 1);
    // The last zone sits in the second county; the rest share the first.
    info.county = (z + 1 == options.zones && options.zones > 1) ? kCounties[1].id : kCounties[0].id;
    info.area_type = kAreaTypes[std::min(z, 2)];
    info.center = {-span / 2.0 + side * (z + 0.5), 0.0};
    const double h = side / 2.0;
    info.ring = {{info.center.x - h, -h}, {info.center.x + h, -h},
                 {info.center.x + h, h},  {info.center.x - h, h}};
    zones.push_back(std::move(info));
  }

  // zones.geojson
  nlohmann::json features = nlohmann::json::array();
  for (const ZoneInfo& z : zones) {
    nlohmann::json ring = nlohmann::json::array();
    for (std::size_t i = 0; i <= z.ring.size(); ++i) {
      const LatLon ll = spec.unproject(z.ring[i % z.ring.size()]);
      ring.push_back({ll.lon, ll.lat});
    }
    features.push_back(
        {{"type", "Feature"},
         {"properties", {{"zone_id", z.id}, {"county_id", z.county}, {"area_type", z.area_type}}},
         {"geometry", {{"type", "Polygon"}, {"coordinates", {ring}}}}});
  }
  write_text(dir / "zones.geojson",
             dump_json({{"type", "FeatureCollection"}, {"features", features}}));

  // edges.csv and traffic.csv: one Gabriel graph per zone, traffic per node
  std::ostringstream edges, traffic;
  edges << "zone_id,node_a_id,node_b_id,lat_a,lon_a,lat_b,lon_b\n";
  traffic << "site_id";
  for (int h = 0; h < 24; ++h) traffic << ",h" << h;
  traffic << '\n';
  for (const ZoneInfo& z : zones) {
    // Slightly inset so rounded coordinates stay inside the polygon.
    const RoadGraph g = random_gabriel_graph(z.id, options.nodes_per_zone, z.center, side * 0.98,
                                             rng, spec);
    auto node_id = [&](std::size_t v) { return fmt::format("{}-{}", z.id, g.nodes()[v].id); };
    for (const RoadEdge& e : g.edges()) {
      const LatLon a = g.nodes()[e.a].location;
      const LatLon b = g.nodes()[e.b].location;
      edges << z.id << ',' << node_id(e.a) << ',' << node_id(e.b) << ',' << coord(a.lat) << ','
            << coord(a.lon) << ',' << coord(b.lat) << ',' << coord(b.lon) << '\n';
    }
    for (std::size_t v = 0; v < g.size(); ++v) {
      // Two-peaked weekday profile scaled per node.
      const double peak = uniform(rng, 40.0, 220.0);
      traffic << node_id(v);
      for (int h = 0; h < 24; ++h) {
        const double shape = 0.15 + 0.85 * std::max(std::exp(-0.5 * std::pow((h - 8) / 2.0, 2)),
                                                     std::exp(-0.5 * std::pow((h - 17) / 2.5, 2)));
        traffic << ',' << std::llround(peak * shape);
      }
      traffic << '\n';
    }
  }
  write_text(dir / "edges.csv", edges.str());
  write_text(dir / "traffic.csv", traffic.str());

  // pois.csv
  std::ostringstream pois;
  pois << "lat,lon,canonical_class,count\n";
  std::vector<PoiRecord> poi_records;
  for (std::size_t i = 0; i < options.pois; ++i) {
    // Denser towards the first (urban) zone.
    const double u = std::pow(unit(rng), 1.6);
    const Point2 p{-span / 2.0 + span * u, uniform(rng, -side / 2.0, side / 2.0)};
    const LatLon ll = spec.unproject(p);
    const std::string cls(kPoiClasses[static_cast<std::size_t>(unit(rng) * kPoiClasses.size())]);
    const int count = 1 + static_cast<int>(unit(rng) * 4.0);
    pois << coord(ll.lat) << ',' << coord(ll.lon) << ',' << cls << ',' << count << '\n';
    poi_records.push_back({"", {std::stod(coord(ll.lat)), std::stod(coord(ll.lon))}, cls, count});
  }
  write_text(dir / "pois.csv", pois.str());

  // cells.csv: res-8 cells whose centroid lies in a zone; first zone wins
  std::set<HexIndex> seen;
  std::vector<HexCell> cells;
  for (std::size_t z = 0; z < zones.size(); ++z) {
    for (const HexIndex& idx : polyfill_planar(zones[z].ring, 8, spec)) {
      if (!seen.insert(idx).second) continue;
      HexCell c;
      c.index = idx;
      c.centroid = centroid(idx, spec);
      const double density = z == 0 ? 9000.0 : (z == 1 ? 4000.0 : 900.0);
      c.population = std::round(density * uniform(rng, 0.3, 1.7));
      c.median_income = std::round(uniform(rng, 25000.0, 140000.0));
      const FixtureCounty& county = zones[z].county == kCounties[0].id ? kCounties[0] : kCounties[1];
      c.ev_share = county.ev / county.vehicles;
      c.zone_id = zones[z].id;
      cells.push_back(std::move(c));
    }
  }
  std::vector<HexIndex> idx;
  for (const HexCell& c : cells) idx.push_back(c.index);
  const std::vector<double> scores = poi_score(idx, poi_records, PoiWeightTable::defaults(), spec);
  std::ostringstream cells_csv;
  cells_csv << "res,q,r,lat,lon,population,poi_score,median_income,ev_share,zone_id\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const HexCell& c = cells[i];
    cells_csv << c.index.resolution << ',' << c.index.q << ',' << c.index.r << ','
              << coord(c.centroid.lat) << ',' << coord(c.centroid.lon) << ',' << num(c.population)
              << ',' << num(scores[i]) << ',' << num(c.median_income) << ',' << num(c.ev_share)
              << ',' << c.zone_id << '\n';
  }
  write_text(dir / "cells.csv", cells_csv.str());

  // counties.csv
  std::ostringstream counties;
  counties << "county_id,ev_count,vehicle_count,share_2024,share_2025,avg_hourly_wage\n";
  for (const FixtureCounty& c : kCounties) {
    counties << c.id << ',' << num(c.ev) << ',' << num(c.vehicles) << ',' << num(c.share_2024)
             << ',' << num(c.share_2025) << ',' << num(c.wage) << '\n';
  }
  write_text(dir / "counties.csv", counties.str());

  const nlohmann::json config = {
      {"seed", 42},
      {"grid",
       {{"origin", {{"lat", spec.origin().lat}, {"lon", spec.origin().lon}}},
        {"edge_m", spec.edge_lengths()}}},
      // Five candidates per zone reach about 70 % of the fixture's demand.
      {"mclp", {{"alpha", 0.65}}},
      {"inputs",
       {{"cells", "cells.csv"},
        {"zones", "zones.geojson"},
        {"edges", "edges.csv"},
        {"pois", "pois.csv"},
        {"counties", "counties.csv"},
        {"traffic", "traffic.csv"}}},
      {"output_dir", "out"},
  };
  write_text(dir / "config.json", dump_json(config));
}

}  // namespace evsite
