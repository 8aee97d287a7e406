#include "evsite/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "evsite/centrality.hpp"
#include "evsite/demand.hpp"
#include "evsite/errors.hpp"
#include "evsite/forecast.hpp"
#include "evsite/roadgraph.hpp"

namespace evsite {

using nlohmann::json;

namespace {

// Runs one stage, prefixing any failure with the stage name while keeping the
// error category (and therefore the CLI exit code).
template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  spdlog::info("stage {}", name);
  try {
    return body();
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("stage {}: {}", name, e.what()));
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(fmt::format("stage {}: {}", name, e.what()));
  } catch (const NumericError& e) {
    throw NumericError(fmt::format("stage {}: {}", name, e.what()));
  } catch (const IoError& e) {
    throw IoError(fmt::format("stage {}: {}", name, e.what()));
  }
}

void warn(InputReport& report, std::string message) {
  spdlog::warn("{}", message);
  report.warnings.push_back(std::move(message));
}

std::string flag(bool b) { return b ? "1" : "0"; }

// Rows joined with LF; every row already ends in a newline.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& header) { out_ << header << '\n'; }
  template <typename... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << fields, first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

struct GridState {
  GridSpec spec;
  std::vector<HexCell> cells;  // sorted by index
  std::map<HexIndex, HexCell> by_index;
  std::map<std::string, Zone> zones;
  std::map<std::string, CountyStats> counties;
  std::vector<EdgeRecord> edges;
  std::vector<TrafficRow> traffic;
};

struct CentralityState {
  std::vector<CandidateSite> candidates;
  std::string scores_csv;
  std::string loss_csv;
  json model;
};

}  // namespace

// ---- inputs -----------------------------------------------------------------

PipelineInputs load_inputs(const PipelineConfig& config, InputReport& report) {
  const GridSpec spec = config.grid();
  PipelineInputs in;
  in.cells = read_cells(config.inputs.cells, config.cell_resolution, spec);
  in.zones = read_zones(config.inputs.zones);
  in.edges = read_edges(config.inputs.edges);
  in.pois = read_pois(config.inputs.pois);
  in.counties = read_counties(config.inputs.counties);
  in.traffic = read_traffic(config.inputs.traffic);

  const std::string cells_file = config.inputs.cells.filename().string();
  const std::string zones_file = config.inputs.zones.filename().string();
  if (in.cells.empty()) throw ValidationError(cells_file, 0, "", "no cells");
  if (in.zones.empty()) throw ValidationError(zones_file, 0, "", "no zones");

  std::set<std::string> county_ids;
  for (const CountyStats& c : in.counties) county_ids.insert(c.county_id);
  std::set<std::string> zone_ids;
  for (const Zone& z : in.zones) {
    zone_ids.insert(z.zone_id);
    try {
      (void)parse_area_type(z.area_type);
    } catch (const ValidationError& e) {
      throw ValidationError(zones_file, 0, "area_type", fmt::format("zone {}: {}", z.zone_id, e.what()));
    }
    if (!county_ids.contains(z.county_id)) {
      throw ValidationError(zones_file, 0, "county_id",
                            fmt::format("zone {} refers to unknown county {}", z.zone_id, z.county_id));
    }
  }

  std::map<std::string, int> cells_per_zone;
  for (const HexCell& c : in.cells) {
    if (!zone_ids.contains(c.zone_id)) {
      throw ValidationError(cells_file, 0, "zone_id",
                            fmt::format("cell ({}, {}) refers to unknown zone {}", c.index.q,
                                        c.index.r, c.zone_id));
    }
    ++cells_per_zone[c.zone_id];
  }
  for (const Zone& z : in.zones) {
    if (!cells_per_zone.contains(z.zone_id)) warn(report, fmt::format("zone {} has no cells", z.zone_id));
  }

  std::map<std::string, int> edges_per_zone;
  std::size_t foreign_edges = 0;
  for (const EdgeRecord& e : in.edges) {
    if (zone_ids.contains(e.zone_id)) {
      ++edges_per_zone[e.zone_id];
    } else {
      ++foreign_edges;
    }
  }
  if (foreign_edges) {
    warn(report, fmt::format("{} edges name an unknown zone and are ignored", foreign_edges));
  }
  for (const Zone& z : in.zones) {
    if (!edges_per_zone.contains(z.zone_id)) {
      warn(report, fmt::format("zone {} has no road edges and yields no candidates", z.zone_id));
    }
  }

  std::set<HexIndex> cell_set;
  for (const HexCell& c : in.cells) cell_set.insert(c.index);
  std::size_t outside = 0;
  for (const PoiRecord& p : in.pois) {
    if (!cell_set.contains(point_to_cell(p.location, config.cell_resolution, spec))) ++outside;
  }
  if (outside) warn(report, fmt::format("{} POIs fall outside every cell and are ignored", outside));

  std::set<std::string> node_ids;
  for (const EdgeRecord& e : in.edges) {
    node_ids.insert(e.node_a);
    node_ids.insert(e.node_b);
  }
  std::size_t orphan_traffic = 0;
  for (const TrafficRow& t : in.traffic) {
    if (!node_ids.contains(t.site_id)) ++orphan_traffic;
  }
  if (orphan_traffic) {
    warn(report, fmt::format("{} traffic rows match no road node", orphan_traffic));
  }
  return in;
}

InputReport validate_inputs(const PipelineConfig& config) {
  InputReport report;
  (void)load_inputs(config, report);
  return report;
}

// ---- staging ----------------------------------------------------------------

int activation_year(std::span<const double> lambda_by_year, std::span<const int> years, double mu,
                    double p, double cap, int min_ports) {
  if (lambda_by_year.size() != years.size() || years.empty()) {
    throw ValidationError("forecast must cover every plan year");
  }
  for (std::size_t i = 0; i < years.size(); ++i) {
    const double rho = lambda_by_year[i] / (min_ports * (1.0 - p) * mu);
    if (rho > cap) return years[i];
  }
  return years.front();
}

std::vector<YearCapital> stage_plan_by_year(BuildPlan& plan) {
  std::vector<YearCapital> out;
  for (int y : plan.years) out.push_back({y, 0, 0.0});
  for (PlannedSite& s : plan.sites) {
    s.activation_year = s.added_hub ? plan.years.front()
                                    : activation_year(s.lambda_by_year, plan.years, s.mu,
                                                      plan.outage_p, plan.utilisation_cap,
                                                      s.min_ports);
    const auto it = std::find(plan.years.begin(), plan.years.end(), s.activation_year);
    YearCapital& row = out[static_cast<std::size_t>(it - plan.years.begin())];
    ++row.activated;
    row.capital += s.plan.c_station;
  }
  return out;
}

// ---- mclp -------------------------------------------------------------------

SolverRun solve_mclp(std::vector<CandidateSite> candidates, std::span<const DemandPoint> demand,
                     const PipelineConfig& config) {
  compute_rank_scores(candidates, config.beta_poi, config.beta_cent);
  SolverRun run;
  run.shortlist = rank_per_zone(candidates, config.k);
  const GridSpec spec = config.grid();
  std::vector<Point2> xy;
  std::vector<double> weights;
  for (const DemandPoint& d : demand) {
    xy.push_back(spec.project(d.location));
    weights.push_back(d.weight);
  }
  run.index = build_coverage_index(run.shortlist, xy, config.radius_m);
  GreedyOptions opts{config.zone_cap};
  run.selection = config.budget_p ? greedy_budget(run.index, weights, *config.budget_p, opts)
                                  : greedy_coverage(run.index, weights, *config.alpha, opts);
  return run;
}

std::string selection_csv(const SolverRun& run) {
  CsvWriter w("step,site_id,zone_id,lat,lon,marginal_demand,cumulative_fraction");
  int step = 0;
  for (const SelectionStep& s : run.selection.steps) {
    const CandidateSite& c = run.shortlist[s.site];
    w.row(++step, c.id, quoted(c.zone_id), coord(c.location.lat), coord(c.location.lon),
          num(s.marginal_demand), num(s.cumulative_fraction));
  }
  return w.str();
}

std::vector<CandidateSite> read_candidates(const std::filesystem::path& path, const GridSpec& spec) {
  const CsvTable t = CsvTable::read(path);
  t.require({"id", "node_id", "zone_id", "lat", "lon", "c_gnn", "poi_load"});
  std::vector<CandidateSite> out;
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    CandidateSite c;
    c.id = t.integer(i, "id");
    if (!ids.insert(c.id).second) throw ValidationError(t.name(), t.line(i), "id", "duplicate id");
    c.node_id = t.text(i, "node_id");
    c.zone_id = t.text(i, "zone_id");
    c.location = {t.number(i, "lat"), t.number(i, "lon")};
    c.xy = spec.project(c.location);
    c.c_gnn = t.number(i, "c_gnn");
    c.poi_load = t.number(i, "poi_load");
    if (t.has("excluded")) {
      const std::string& v = t.text(i, "excluded");
      if (v != "0" && v != "1" && !v.empty()) {
        throw ValidationError(t.name(), t.line(i), "excluded", "expected 0 or 1");
      }
      c.excluded = v == "1";
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<DemandPoint> read_demand_points(const std::filesystem::path& path,
                                            const GridSpec& spec) {
  const CsvTable t = CsvTable::read(path);
  t.require({"id", "lat", "lon", "d"});
  std::vector<DemandPoint> out;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    DemandPoint d;
    d.id = static_cast<std::size_t>(t.integer(i, "id"));
    d.location = {t.number(i, "lat"), t.number(i, "lon")};
    d.p_norm = t.has("p_norm") ? t.optional_number(i, "p_norm").value_or(0.0) : 0.0;
    d.s_norm = t.has("s_norm") ? t.optional_number(i, "s_norm").value_or(0.0) : 0.0;
    d.weight = t.number(i, "d");
    if (!(d.weight >= 0.0)) throw ValidationError(t.name(), t.line(i), "d", "must be >= 0");
    (void)spec;
    out.push_back(d);
  }
  return out;
}

// ---- reports ----------------------------------------------------------------

void compute_reports(BuildPlan& plan, const PipelineConfig& config, std::span<const HexCell> cells) {
  const GridSpec spec = config.grid();
  std::vector<HexIndex> idx;
  std::vector<Point2> cell_xy;
  std::vector<EquityCell> eq;
  for (const HexCell& c : cells) {
    idx.push_back(c.index);
    cell_xy.push_back(planar_centroid(c.index, spec));
    eq.push_back({cell_xy.back(), c.population, c.median_income});
  }
  std::vector<Point2> sites;
  for (const PlannedSite& s : plan.sites) sites.push_back(s.xy);

  // One sample set for every radius keeps area coverage monotone in R.
  const std::vector<Point2> samples = sample_cells(idx, spec, config.area_samples, config.seed + 1);
  plan.coverage.clear();
  std::vector<double> radii = config.radii_m;
  std::sort(radii.begin(), radii.end());
  for (double r : radii) {
    plan.coverage.push_back({r, tile_coverage(cell_xy, sites, r), area_fraction(samples, sites, r)});
  }
  if (sites.empty()) {
    spdlog::warn("plan has no sites; equity report left empty");
    plan.equity = {};
  } else {
    plan.equity = equity_report(eq, sites);
  }

  const int span = config.capacity_target_year - config.capacity_base_year;
  plan.cagr_dcfc = implied_cagr(config.dcfc_base, config.dcfc_target, span);
  plan.cagr_l2 = implied_cagr(config.l2_base, config.l2_target, span);
  const auto dcfc = capacity_path(config.dcfc_base, plan.cagr_dcfc, span);
  const auto l2 = capacity_path(config.l2_base, plan.cagr_l2, span);
  plan.capacity.clear();
  for (int t = 0; t <= span; ++t) {
    plan.capacity.push_back({config.capacity_base_year + t, dcfc[static_cast<std::size_t>(t)],
                             l2[static_cast<std::size_t>(t)]});
  }
}

namespace {

json coverage_json(const BuildPlan& plan) {
  json out = json::array();
  for (const CoverageMetrics& m : plan.coverage) {
    out.push_back({{"radius_m", m.radius_m},
                   {"tile_coverage", m.tile_coverage},
                   {"area_coverage", m.area_coverage}});
  }
  return out;
}

json equity_json(const EquityReport& e) {
  return {{"low_income_m", e.low},   {"mid_income_m", e.mid}, {"high_income_m", e.high},
          {"gap_m", e.gap},          {"total_population", e.total_population}};
}

json capacity_json(const BuildPlan& plan) {
  json rows = json::array();
  for (const CapacityRow& r : plan.capacity) {
    rows.push_back({{"year", r.year}, {"dcfc", r.dcfc}, {"l2", r.l2}});
  }
  return {{"cagr_dcfc", plan.cagr_dcfc}, {"cagr_l2", plan.cagr_l2}, {"rows", rows}};
}

json capital_json(const BuildPlan& plan) {
  json rows = json::array();
  for (const YearCapital& y : plan.capital) {
    rows.push_back({{"year", y.year}, {"activated", y.activated}, {"capital", y.capital}});
  }
  return rows;
}

json reach_json(const BuildPlan& plan) {
  int added = 0;
  for (const PlannedSite& s : plan.sites) added += s.added_hub ? 1 : 0;
  return {{"threshold_m", plan.reach_threshold_m},
          {"max_distance_m", plan.reachability.max_distance},
          {"violations", plan.reachability.violations.size()},
          {"hubs_added", added}};
}

}  // namespace

json metrics_to_json(const BuildPlan& plan) {
  double capital = 0.0;
  for (const YearCapital& y : plan.capital) capital += y.capital;
  return {
      {"seed", plan.seed},
      {"sites", plan.sites.size()},
      {"outage_p", plan.outage_p},
      {"demand",
       {{"total", plan.demand_total},
        {"covered", plan.demand_covered},
        {"fraction", plan.demand_total > 0.0 ? plan.demand_covered / plan.demand_total : 1.0}}},
      {"coverage", coverage_json(plan)},
      {"equity", equity_json(plan.equity)},
      {"capacity", capacity_json(plan)},
      {"capital", capital_json(plan)},
      {"total_capital", capital},
      {"reachability", reach_json(plan)},
  };
}

json plan_to_geojson(const BuildPlan& plan) {
  json features = json::array();
  for (const PlannedSite& s : plan.sites) {
    const QueueMetrics& m = s.plan.metrics;
    json props = {
        {"site_id", s.site_id},
        {"node_id", s.node_id},
        {"zone_id", s.zone_id},
        {"county_id", s.county_id},
        {"type", std::string(to_string(s.plan.charger_type))},
        {"added_hub", s.added_hub},
        {"ports", s.plan.c},
        {"capacity_N", s.plan.N},
        {"min_ports", s.min_ports},
        {"activation_year", s.activation_year},
        {"lambda_design", s.lambda_design},
        {"lambda_by_year", s.lambda_by_year},
        {"mu", s.mu},
        {"c_eff", m.c_eff},
        {"rho_eff", m.rho_eff},
        {"P0", m.P0},
        {"Lq", m.Lq},
        {"Wq", m.Wq},
        {"C_station", s.plan.c_station},
        {"C_waiting", s.plan.c_waiting},
        {"objective", s.plan.objective},
    };
    features.push_back({{"type", "Feature"},
                        {"geometry",
                         {{"type", "Point"}, {"coordinates", {s.location.lon, s.location.lat}}}},
                        {"properties", props}});
  }
  json years = plan.years;
  return {
      {"type", "FeatureCollection"},
      {"features", features},
      {"plan",
       {{"seed", plan.seed},
        {"years", years},
        {"coverage", coverage_json(plan)},
        {"equity", equity_json(plan.equity)},
        {"capacity", capacity_json(plan)},
        {"capital", capital_json(plan)},
        {"reachability", reach_json(plan)}}},
  };
}

void write_plan(const BuildPlan& plan, const std::filesystem::path& dir) {
  write_text(dir / "build_plan.geojson", dump_json(plan_to_geojson(plan)));
  write_text(dir / "metrics.json", dump_json(metrics_to_json(plan)));

  CsvWriter sites("site_id,type,c,c_eff,rho_eff,P0,Lq,Wq,C_station,C_waiting,objective");
  for (const PlannedSite& s : plan.sites) {
    const QueueMetrics& m = s.plan.metrics;
    sites.row(s.site_id, to_string(s.plan.charger_type), s.plan.c, num(m.c_eff), num(m.rho_eff),
              num(m.P0), num(m.Lq), num(m.Wq), num(s.plan.c_station), num(s.plan.c_waiting),
              num(s.plan.objective));
  }
  write_text(dir / "sites.csv", sites.str());

  CsvWriter sel("step,site_id,zone_id,lat,lon,marginal_demand,cumulative_fraction");
  json points = json::array();
  for (const SelectionRow& r : plan.selection) {
    sel.row(r.step, r.site_id, quoted(r.zone_id), coord(r.location.lat), coord(r.location.lon),
            num(r.marginal_demand), num(r.cumulative_fraction));
    points.push_back({{"type", "Feature"},
                      {"geometry",
                       {{"type", "Point"}, {"coordinates", {r.location.lon, r.location.lat}}}},
                      {"properties",
                       {{"step", r.step},
                        {"site_id", r.site_id},
                        {"zone_id", r.zone_id},
                        {"marginal_demand", r.marginal_demand},
                        {"cumulative_fraction", r.cumulative_fraction}}}});
  }
  write_text(dir / "selection.csv", sel.str());
  write_text(dir / "selection.geojson",
             dump_json({{"type", "FeatureCollection"}, {"features", points}}));

  CsvWriter reach("centroid_id,hub_id,distance_m,violation");
  for (const Reachability& r : plan.reachability.rows) {
    reach.row(r.centroid_id, r.hub_id, num(r.distance_m), flag(r.violation));
  }
  write_text(dir / "reachability.csv", reach.str());

  CsvWriter fc("county_id,year,beta");
  for (const ForecastRow& r : plan.forecast) fc.row(quoted(r.county_id), r.year, num(r.beta));
  write_text(dir / "forecast.csv", fc.str());

  CsvWriter cap("year,activated,capital");
  for (const YearCapital& y : plan.capital) cap.row(y.year, y.activated, num(y.capital));
  write_text(dir / "capital.csv", cap.str());
}

json recompute_report(const PipelineConfig& config, const std::filesystem::path& plan_path) {
  const std::string name = plan_path.filename().string();
  const json doc = json::parse(read_text(plan_path), nullptr, false);
  if (doc.is_discarded() || !doc.contains("features") || !doc["features"].is_array()) {
    throw ValidationError(name, 0, "", "not a GeoJSON FeatureCollection");
  }
  const GridSpec spec = config.grid();
  BuildPlan plan;
  plan.seed = config.seed;
  for (std::size_t i = 0; i < doc["features"].size(); ++i) {
    const json& f = doc["features"][i];
    const json* c = nullptr;
    if (f.contains("geometry") && f["geometry"].contains("coordinates")) c = &f["geometry"]["coordinates"];
    if (!c || !c->is_array() || c->size() < 2) {
      throw ValidationError(name, 0, fmt::format("features[{}].geometry", i), "expected a Point");
    }
    PlannedSite s;
    s.location = {(*c)[1].get<double>(), (*c)[0].get<double>()};
    s.xy = spec.project(s.location);
    plan.sites.push_back(std::move(s));
  }
  const std::vector<HexCell> cells = read_cells(config.inputs.cells, config.cell_resolution, spec);
  compute_reports(plan, config, cells);
  return {{"sites", plan.sites.size()},
          {"coverage", coverage_json(plan)},
          {"equity", equity_json(plan.equity)},
          {"capacity", capacity_json(plan)}};
}

// ---- run --------------------------------------------------------------------

BuildPlan run(const PipelineConfig& config, const RunOptions& options) {
  validate_config(config);
  const std::filesystem::path out_dir = config.output_dir;
  const std::filesystem::path debug_dir = out_dir / "debug";
  auto debug_write = [&](const std::string& file, const std::string& text) {
    if (options.debug) write_text(debug_dir / file, text);
  };
  debug_write("config.resolved.json", dump_json(config_to_json(config)));

  BuildPlan plan;
  plan.seed = config.seed;
  plan.years = config.years;
  plan.utilisation_cap = config.utilisation_cap;
  plan.reach_threshold_m = config.reach_threshold_m;

  // grid: load and cross-check inputs, recompute POI scores
  GridState grid = stage("grid", [&] {
    GridState g;
    g.spec = config.grid();
    InputReport report;
    PipelineInputs in = load_inputs(config, report);
    const PoiWeightTable table(config.poi_weights);
    std::vector<HexIndex> idx;
    for (const HexCell& c : in.cells) idx.push_back(c.index);
    const std::vector<double> scores = poi_score(idx, in.pois, table, g.spec);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < in.cells.size(); ++i) {
      const double stated = in.cells[i].poi_score;
      if (std::abs(stated - scores[i]) > 1e-9 * std::max(1.0, std::abs(scores[i]))) ++changed;
      in.cells[i].poi_score = scores[i];
    }
    if (changed) {
      warn(report, fmt::format("{} cells carry a poi_score that differs from the POI file; "
                               "recomputed values are used", changed));
    }
    g.cells = std::move(in.cells);
    std::sort(g.cells.begin(), g.cells.end(),
              [](const HexCell& a, const HexCell& b) { return a.index < b.index; });
    for (const HexCell& c : g.cells) g.by_index.emplace(c.index, c);
    for (Zone& z : in.zones) g.zones.emplace(z.zone_id, std::move(z));
    for (CountyStats& c : in.counties) g.counties.emplace(c.county_id, std::move(c));
    g.edges = std::move(in.edges);
    g.traffic = std::move(in.traffic);
    if (options.debug) {
      std::string text;
      for (const std::string& w : report.warnings) text += w + "\n";
      write_text(debug_dir / "input_warnings.txt", text);
      CsvWriter cells("res,q,r,lat,lon,population,poi_score,median_income,ev_share,zone_id");
      for (const HexCell& c : g.cells) {
        cells.row(c.index.resolution, c.index.q, c.index.r, coord(c.centroid.lat),
                  coord(c.centroid.lon), num(c.population), num(c.poi_score),
                  num(c.median_income), num(c.ev_share), quoted(c.zone_id));
      }
      write_text(debug_dir / "cells.csv", cells.str());
    }
    return g;
  });
  const GridSpec& spec = grid.spec;

  // centrality: train on the training zones, score every zone, keep the top share
  CentralityState cent = stage("centrality", [&] {
    CentralityState st;
    std::set<std::string> training(config.training_zones.begin(), config.training_zones.end());
    for (const std::string& z : training) {
      if (!grid.zones.contains(z)) {
        throw ValidationError("config", 0, "centrality.training_zones", "unknown zone " + z);
      }
    }
    struct ZoneGraph {
      RoadGraph graph;
      Eigen::MatrixXd features;
      std::vector<double> density;
    };
    std::vector<ZoneGraph> graphs;
    std::vector<TrainingZone> train_set;
    for (const auto& [zone_id, zone] : grid.zones) {
      std::vector<EdgeRecord> mine;
      for (const EdgeRecord& e : grid.edges) {
        if (e.zone_id == zone_id) mine.push_back(e);
      }
      if (mine.empty()) continue;
      RoadGraph g;
      try {
        g = build_graph(zone_id, zone.ring, mine, spec);
      } catch (const ValidationError& e) {
        spdlog::warn("zone {}: {}", zone_id, e.what());
        continue;
      }
      std::vector<double> density;
      for (const RoadNode& n : g.nodes()) {
        const auto it = grid.by_index.find(point_to_cell(n.location, config.cell_resolution, spec));
        density.push_back(it == grid.by_index.end() ? 0.0 : it->second.poi_score);
      }
      Eigen::MatrixXd x = node_features(g, density);
      if (training.empty() || training.contains(zone_id)) {
        const std::vector<double> target = betweenness(g, config.path_metric);
        train_set.push_back(make_training_zone(g, x, target));
      }
      graphs.push_back({std::move(g), std::move(x), std::move(density)});
    }
    if (graphs.empty()) throw ValidationError("no zone has a usable road graph");
    if (train_set.empty()) throw ValidationError("no training zone has a usable road graph");

    TrainConfig tc{config.hidden_dim, config.learning_rate, config.epochs, config.seed};
    const TrainResult trained = train(train_set, tc);
    spdlog::info("centrality: {} zones, final loss {:.6g}", train_set.size(), trained.final_loss);

    CsvWriter scores("zone_id,node_id,c_v,kept");
    std::int64_t next_id = 1;
    for (const ZoneGraph& zg : graphs) {
      const CentralityScores s = forward(trained.model, zg.graph, zg.features);
      const std::vector<bool> kept = percentile_filter(s.values, config.tau);
      for (std::size_t v = 0; v < zg.graph.size(); ++v) {
        const RoadNode& n = zg.graph.nodes()[v];
        scores.row(quoted(zg.graph.zone_id()), quoted(n.id), num(s.values[v]), flag(kept[v]));
        if (!kept[v]) continue;
        CandidateSite c;
        c.id = next_id++;
        c.node_id = n.id;
        c.zone_id = zg.graph.zone_id();
        c.location = n.location;
        c.xy = n.xy;
        c.c_gnn = s.values[v];
        c.poi_load = zg.density[v];
        st.candidates.push_back(std::move(c));
      }
    }
    st.scores_csv = scores.str();
    CsvWriter loss("epoch,loss");
    for (std::size_t e = 0; e < trained.loss_history.size(); ++e) {
      loss.row(e, num(trained.loss_history[e]));
    }
    st.loss_csv = loss.str();
    st.model = model_to_json(trained.model);
    return st;
  });
  debug_write("scores.csv", cent.scores_csv);
  debug_write("model.json", dump_json(cent.model));
  debug_write("training_loss.csv", cent.loss_csv);

  // demand: fine-resolution points weighted by population and POI score
  std::vector<DemandPoint> demand = stage("demand", [&] {
    std::set<HexIndex> fine;
    for (const HexCell& c : grid.cells) {
      for (const HexIndex& d : descendants(c.index, config.demand_resolution, spec)) fine.insert(d);
    }
    const std::vector<HexIndex> fine_cells(fine.begin(), fine.end());
    DemandBuild built = build_demand_points(fine_cells, grid.by_index, config.cell_resolution,
                                            config.w_pop, config.w_poi, spec);
    if (built.orphans) spdlog::warn("demand: {} fine cells have no parent features", built.orphans);
    std::vector<double> weights, incomes;
    for (const DemandPoint& p : built.points) {
      weights.push_back(p.weight);
      incomes.push_back(
          grid.by_index.at(ancestor(p.cell, config.cell_resolution, spec)).median_income);
    }
    const std::vector<double> up = income_uplift(weights, incomes, config.income_uplift);
    for (std::size_t i = 0; i < built.points.size(); ++i) built.points[i].weight = up[i];
    return std::move(built.points);
  });
  if (options.debug) {
    CsvWriter w("id,lat,lon,p_norm,s_norm,d");
    for (const DemandPoint& p : demand) {
      w.row(p.id, coord(p.location.lat), coord(p.location.lon), num(p.p_norm), num(p.s_norm),
            num(p.weight));
    }
    write_text(debug_dir / "demand_points.csv", w.str());
  }

  // mclp: rank, shortlist, greedy cover
  SolverRun solved = stage("mclp", [&] {
    SolverRun r = solve_mclp(cent.candidates, demand, config);
    if (options.debug) {
      std::vector<CandidateSite> ranked = cent.candidates;
      compute_rank_scores(ranked, config.beta_poi, config.beta_cent);
      CsvWriter w("id,node_id,zone_id,lat,lon,c_gnn,poi_load,sigma,excluded");
      for (const CandidateSite& c : ranked) {
        w.row(c.id, quoted(c.node_id), quoted(c.zone_id), coord(c.location.lat),
              coord(c.location.lon), num(c.c_gnn), num(c.poi_load), num(c.sigma),
              flag(c.excluded));
      }
      write_text(debug_dir / "candidates.csv", w.str());

      std::vector<double> weights;
      for (const DemandPoint& d : demand) weights.push_back(d.weight);
      std::vector<double> cover;
      for (const auto& set : r.index.sets) {
        double sum = 0.0;
        for (std::size_t j : set) sum += weights[j];
        cover.push_back(sum);
      }
      const ZoneScoring zs = score_zone_sites(r.shortlist, cover, config.beta_cent, config.beta_cov);
      CsvWriter zb("zone_id,site_id,score");
      for (const ZoneChoice& z : zs.chosen) zb.row(quoted(z.zone_id), z.site_id, num(z.score));
      write_text(debug_dir / "zone_best.csv", zb.str());
    }
    return r;
  });
  plan.demand_total = solved.selection.total_demand;
  plan.demand_covered = solved.selection.covered_demand;
  {
    int step = 0;
    for (const SelectionStep& s : solved.selection.steps) {
      const CandidateSite& c = solved.shortlist[s.site];
      plan.selection.push_back({++step, c.id, c.zone_id, c.location, s.marginal_demand,
                                s.cumulative_fraction});
      PlannedSite p;
      p.site_id = c.id;
      p.node_id = c.node_id;
      p.zone_id = c.zone_id;
      const Zone& z = grid.zones.at(c.zone_id);
      p.county_id = z.county_id;
      p.area_type = z.area_type;
      p.location = c.location;
      p.xy = c.xy;
      p.plan.charger_type = config.site_charger_type;
      p.mu = config.mu(config.site_charger_type);
      plan.sites.push_back(std::move(p));
    }
  }

  // voronoi: every coarse centroid within the threshold of a hub
  stage("voronoi", [&] {
    std::map<HexIndex, double> weight;
    std::map<HexIndex, const HexCell*> heaviest;
    for (const HexCell& c : grid.cells) {
      const HexIndex h = ancestor(c.index, config.hub_resolution, spec);
      weight[h] += c.population;
      auto [it, fresh] = heaviest.emplace(h, &c);
      if (!fresh && c.population > it->second->population) it->second = &c;
    }
    std::vector<Centroid> centroids;
    std::vector<HexIndex> centroid_cell;
    for (const auto& [h, w] : weight) {
      centroids.push_back({static_cast<std::int64_t>(centroids.size() + 1), planar_centroid(h, spec), w});
      centroid_cell.push_back(h);
    }
    std::vector<Hub> hubs;
    for (PlannedSite& s : plan.sites) {
      if (s.plan.charger_type != ChargerType::kDCFC) continue;
      s.min_ports = config.hub_min_ports;
      hubs.push_back({s.site_id, s.xy, false, config.hub_min_ports});
    }
    const std::vector<Hub> added =
        repair_coverage(centroids, hubs, config.reach_threshold_m, config.hub_min_ports);
    for (const Hub& h : added) {
      std::size_t at = 0;
      while (at < centroids.size() &&
             !(centroids[at].xy.x == h.xy.x && centroids[at].xy.y == h.xy.y)) {
        ++at;
      }
      if (at == centroids.size()) throw NumericError("repair hub does not sit on a centroid");
      const HexCell& cell = *heaviest.at(centroid_cell[at]);
      const Zone& z = grid.zones.at(cell.zone_id);
      PlannedSite p;
      p.site_id = h.id;
      p.zone_id = z.zone_id;
      p.county_id = z.county_id;
      p.area_type = z.area_type;
      p.location = spec.unproject(h.xy);
      p.xy = h.xy;
      p.added_hub = true;
      p.min_ports = h.min_ports;
      p.plan.charger_type = ChargerType::kDCFC;
      p.mu = config.mu(ChargerType::kDCFC);
      plan.sites.push_back(std::move(p));
      hubs.push_back(h);
    }
    if (!added.empty()) spdlog::info("voronoi: {} hubs added by repair", added.size());
    plan.reachability = assign_nearest(centroids, hubs, config.reach_threshold_m);
    if (!plan.reachability.violations.empty()) {
      throw NumericError("reachability repair left violations");
    }
    if (options.debug) {
      CsvWriter w("centroid_id,res,q,r,lat,lon,weight");
      for (std::size_t i = 0; i < centroids.size(); ++i) {
        const LatLon ll = spec.unproject(centroids[i].xy);
        w.row(centroids[i].id, centroid_cell[i].resolution, centroid_cell[i].q, centroid_cell[i].r,
              coord(ll.lat), coord(ll.lon), num(centroids[i].weight));
      }
      write_text(debug_dir / "centroids.csv", w.str());
    }
  });

  // queue: size every site for its design arrival rate
  stage("queue", [&] {
    plan.outage_p = outage_rate(config.outage);
    std::map<std::string, const TrafficRow*> traffic;
    std::array<double, 24> mean{};
    for (const TrafficRow& t : grid.traffic) {
      traffic.emplace(t.site_id, &t);
      for (std::size_t h = 0; h < 24; ++h) mean[h] += t.counts[h];
    }
    for (double& m : mean) m = grid.traffic.empty() ? 0.0 : m / grid.traffic.size();

    std::map<std::string, std::vector<double>> beta;
    for (const auto& [id, county] : grid.counties) {
      const double g = county_cagr(county.share_2024, county.share_2025);
      const Envelope env(config.envelope);
      for (int y : config.years) {
        const double cap = env.empty() ? 1.0 : env.at(y);
        const double b = project_share(county.beta(), g, y - config.base_year, cap);
        beta[id].push_back(b);
        plan.forecast.push_back({id, y, b});
      }
    }

    CsvWriter trace("site_id,node_id,county_id,year,beta,lambda");
    for (PlannedSite& s : plan.sites) {
      std::array<double, 24> counts = mean;
      const auto it = traffic.find(s.node_id);
      if (it != traffic.end()) {
        counts = it->second->counts;
      } else {
        if (grid.traffic.empty()) {
          throw ValidationError(config.inputs.traffic.filename().string(), 0, "site_id",
                                "no traffic rows to size sites with");
        }
        if (!s.added_hub) {
          spdlog::warn("site {} (node {}) has no traffic row; using the mean profile", s.site_id,
                       s.node_id);
        }
      }
      const std::vector<double>& b = beta.at(s.county_id);
      s.lambda_by_year.clear();
      for (std::size_t i = 0; i < config.years.size(); ++i) {
        s.lambda_by_year.push_back(arrival_rates(std::to_string(s.site_id), counts, b[i]).design);
        trace.row(s.site_id, quoted(s.node_id), quoted(s.county_id), config.years[i], num(b[i]),
                  num(s.lambda_by_year.back()));
      }
      s.lambda_design = *std::max_element(s.lambda_by_year.begin(), s.lambda_by_year.end());
      const ChargerType type = s.plan.charger_type;
      const CostParams cost = config.costs.params(type, parse_area_type(s.area_type),
                                                  grid.counties.at(s.county_id).avg_hourly_wage);
      PortCaps caps{config.utilisation_cap, s.min_ports, config.c_max, config.n_extra,
                    config.convention};
      s.plan = optimize_ports(s.lambda_design, s.mu, plan.outage_p, cost, caps,
                              std::to_string(s.site_id));
    }
    debug_write("arrival_rates.csv", trace.str());
  });

  // forecast: activation years and capital by year
  stage("forecast", [&] { plan.capital = stage_plan_by_year(plan); });

  stage("reports", [&] {
    compute_reports(plan, config, grid.cells);
    write_plan(plan, out_dir);
  });
  return plan;
}

}  // namespace evsite
