#include "evsite/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "evsite/demand.hpp"
#include "evsite/errors.hpp"

namespace evsite {

using nlohmann::json;

namespace {

constexpr const char* kConfigFile = "config";

std::string metric_name(PathMetric m) { return m == PathMetric::kHops ? "hops" : "length"; }

std::string convention_name(ServerConvention c) {
  return c == ServerConvention::kContinuous ? "continuous" : "floor";
}

template <typename T>
json nullable(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// Every key in `doc` must exist in `defaults`; free-form maps are exempt.
void check_keys(const json& doc, const json& defaults, const std::string& prefix) {
  if (!doc.is_object()) return;
  for (const auto& [key, value] : doc.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) {
      throw ValidationError(kConfigFile, 0, path, "unknown configuration key");
    }
    const json& d = defaults.at(key);
    static const std::vector<std::string> free_form{"envelope", "poi_weights", "area_multipliers"};
    if (std::find(free_form.begin(), free_form.end(), key) != free_form.end()) continue;
    if (d.is_object()) {
      if (!value.is_object()) throw ValidationError(kConfigFile, 0, path, "expected an object");
      check_keys(value, d, path);
    }
  }
}

// Typed read of doc[a][b]... with a field path in the error.
template <typename T>
void read(const json& doc, std::initializer_list<const char*> keys, T& out) {
  const json* node = &doc;
  std::string path;
  for (const char* k : keys) {
    path += path.empty() ? k : std::string(".") + k;
    if (!node->is_object() || !node->contains(k)) return;
    node = &node->at(k);
  }
  try {
    out = node->get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(kConfigFile, 0, path, fmt::format("wrong type ({})", node->type_name()));
  }
}

template <typename T>
void read_opt(const json& doc, std::initializer_list<const char*> keys, std::optional<T>& out) {
  const json* node = &doc;
  std::string path;
  for (const char* k : keys) {
    path += path.empty() ? k : std::string(".") + k;
    if (!node->is_object() || !node->contains(k)) return;
    node = &node->at(k);
  }
  if (node->is_null()) {
    out.reset();
    return;
  }
  try {
    out = node->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(kConfigFile, 0, path, fmt::format("wrong type ({})", node->type_name()));
  }
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

PipelineConfig::PipelineConfig() {
  const PoiWeightTable defaults = PoiWeightTable::defaults();
  poi_weights = defaults.weights();
}

GridSpec PipelineConfig::grid() const { return GridSpec(origin, edge_m, meters_per_degree); }

json config_to_json(const PipelineConfig& c) {
  json doc;
  doc["seed"] = c.seed;
  doc["stages"] = c.stages;
  doc["grid"] = {
      {"origin", {{"lat", c.origin.lat}, {"lon", c.origin.lon}}},
      {"edge_m", c.edge_m},
      {"meters_per_degree", c.meters_per_degree},
      {"cell_resolution", c.cell_resolution},
      {"demand_resolution", c.demand_resolution},
      {"hub_resolution", c.hub_resolution},
  };
  doc["centrality"] = {
      {"tau", c.tau},
      {"hidden_dim", c.hidden_dim},
      {"learning_rate", c.learning_rate},
      {"epochs", c.epochs},
      {"path_metric", metric_name(c.path_metric)},
      {"training_zones", c.training_zones},
  };
  doc["demand"] = {
      {"w_pop", c.w_pop},
      {"w_poi", c.w_poi},
      {"income_uplift", c.income_uplift},
      {"poi_weights", c.poi_weights},
  };
  doc["mclp"] = {
      {"radius_m", c.radius_m}, {"beta_poi", c.beta_poi},  {"beta_cent", c.beta_cent},
      {"beta_cov", c.beta_cov}, {"k", c.k},                {"budget_p", nullable(c.budget_p)},
      {"alpha", nullable(c.alpha)}, {"zone_cap", nullable(c.zone_cap)},
  };
  json events = json::array();
  for (const OutageEvent& e : c.outage.events) {
    events.push_back({{"days", e.days}, {"households", e.households}});
  }
  doc["queue"] = {
      {"utilisation_cap", c.utilisation_cap},
      {"mu_dcfc", c.mu_dcfc},
      {"mu_l2", c.mu_l2},
      {"n_extra", c.n_extra},
      {"c_max", c.c_max},
      {"server_convention", convention_name(c.convention)},
      {"site_charger_type", std::string(to_string(c.site_charger_type))},
      {"outage",
       {{"events", events},
        {"households_total", c.outage.households_total},
        {"days_total", c.outage.days_total}}},
  };
  doc["costs"] = {
      {"dcfc", {{"unit", c.costs.dcfc_unit}, {"install", c.costs.dcfc_install}}},
      {"l2", {{"unit", c.costs.l2_unit}, {"install", c.costs.l2_install}}},
      {"area_multipliers",
       {{"urban", c.costs.mult_urban},
        {"suburban", c.costs.mult_suburban},
        {"mixed", c.costs.mult_mixed},
        {"rural", c.costs.mult_rural}}},
  };
  doc["voronoi"] = {{"threshold_m", c.reach_threshold_m}, {"hub_min_ports", c.hub_min_ports}};
  json env = json::object();
  for (const auto& [year, cap] : c.envelope) env[std::to_string(year)] = cap;
  doc["forecast"] = {{"base_year", c.base_year}, {"years", c.years}, {"envelope", env}};
  doc["reports"] = {
      {"radii_m", c.radii_m},
      {"area_samples", c.area_samples},
      {"capacity",
       {{"base_year", c.capacity_base_year},
        {"target_year", c.capacity_target_year},
        {"dcfc_base", c.dcfc_base},
        {"dcfc_target", c.dcfc_target},
        {"l2_base", c.l2_base},
        {"l2_target", c.l2_target}}},
  };
  doc["inputs"] = {
      {"cells", c.inputs.cells.string()},       {"zones", c.inputs.zones.string()},
      {"edges", c.inputs.edges.string()},       {"pois", c.inputs.pois.string()},
      {"counties", c.inputs.counties.string()}, {"traffic", c.inputs.traffic.string()},
  };
  doc["output_dir"] = c.output_dir.string();
  return doc;
}

PipelineConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ValidationError(kConfigFile, 0, "", "top level must be an object");
  PipelineConfig c;
  check_keys(doc, config_to_json(c), "");

  read(doc, {"seed"}, c.seed);
  read(doc, {"stages"}, c.stages);

  read(doc, {"grid", "origin", "lat"}, c.origin.lat);
  read(doc, {"grid", "origin", "lon"}, c.origin.lon);
  read(doc, {"grid", "edge_m"}, c.edge_m);
  read(doc, {"grid", "meters_per_degree"}, c.meters_per_degree);
  read(doc, {"grid", "cell_resolution"}, c.cell_resolution);
  read(doc, {"grid", "demand_resolution"}, c.demand_resolution);
  read(doc, {"grid", "hub_resolution"}, c.hub_resolution);

  read(doc, {"centrality", "tau"}, c.tau);
  read(doc, {"centrality", "hidden_dim"}, c.hidden_dim);
  read(doc, {"centrality", "learning_rate"}, c.learning_rate);
  read(doc, {"centrality", "epochs"}, c.epochs);
  std::string metric = metric_name(c.path_metric);
  read(doc, {"centrality", "path_metric"}, metric);
  if (metric == "hops") {
    c.path_metric = PathMetric::kHops;
  } else if (metric == "length") {
    c.path_metric = PathMetric::kLength;
  } else {
    throw ValidationError(kConfigFile, 0, "centrality.path_metric", "expected hops or length");
  }
  read(doc, {"centrality", "training_zones"}, c.training_zones);

  read(doc, {"demand", "w_pop"}, c.w_pop);
  read(doc, {"demand", "w_poi"}, c.w_poi);
  read(doc, {"demand", "income_uplift"}, c.income_uplift);
  if (doc.contains("demand") && doc["demand"].contains("poi_weights")) {
    std::map<std::string, double> w;
    read(doc, {"demand", "poi_weights"}, w);
    c.poi_weights = std::move(w);
  }

  read(doc, {"mclp", "radius_m"}, c.radius_m);
  read(doc, {"mclp", "beta_poi"}, c.beta_poi);
  read(doc, {"mclp", "beta_cent"}, c.beta_cent);
  read(doc, {"mclp", "beta_cov"}, c.beta_cov);
  read(doc, {"mclp", "k"}, c.k);
  read_opt(doc, {"mclp", "budget_p"}, c.budget_p);
  read_opt(doc, {"mclp", "alpha"}, c.alpha);
  read_opt(doc, {"mclp", "zone_cap"}, c.zone_cap);

  read(doc, {"queue", "utilisation_cap"}, c.utilisation_cap);
  read(doc, {"queue", "mu_dcfc"}, c.mu_dcfc);
  read(doc, {"queue", "mu_l2"}, c.mu_l2);
  read(doc, {"queue", "n_extra"}, c.n_extra);
  read(doc, {"queue", "c_max"}, c.c_max);
  std::string conv = convention_name(c.convention);
  read(doc, {"queue", "server_convention"}, conv);
  if (conv == "continuous") {
    c.convention = ServerConvention::kContinuous;
  } else if (conv == "floor") {
    c.convention = ServerConvention::kFloor;
  } else {
    throw ValidationError(kConfigFile, 0, "queue.server_convention", "expected continuous or floor");
  }
  std::string type(to_string(c.site_charger_type));
  read(doc, {"queue", "site_charger_type"}, type);
  try {
    c.site_charger_type = parse_charger_type(type);
  } catch (const ValidationError& e) {
    throw ValidationError(kConfigFile, 0, "queue.site_charger_type", e.what());
  }
  if (doc.contains("queue") && doc["queue"].contains("outage")) {
    const json& o = doc["queue"]["outage"];
    c.outage.events.clear();
    if (o.contains("events")) {
      for (const json& e : o["events"]) {
        if (!e.is_object() || !e.contains("days") || !e.contains("households")) {
          throw ValidationError(kConfigFile, 0, "queue.outage.events",
                                "each event needs days and households");
        }
        c.outage.events.push_back({e["days"].get<double>(), e["households"].get<double>()});
      }
    }
    read(doc, {"queue", "outage", "households_total"}, c.outage.households_total);
    read(doc, {"queue", "outage", "days_total"}, c.outage.days_total);
  }

  read(doc, {"costs", "dcfc", "unit"}, c.costs.dcfc_unit);
  read(doc, {"costs", "dcfc", "install"}, c.costs.dcfc_install);
  read(doc, {"costs", "l2", "unit"}, c.costs.l2_unit);
  read(doc, {"costs", "l2", "install"}, c.costs.l2_install);
  read(doc, {"costs", "area_multipliers", "urban"}, c.costs.mult_urban);
  read(doc, {"costs", "area_multipliers", "suburban"}, c.costs.mult_suburban);
  read(doc, {"costs", "area_multipliers", "mixed"}, c.costs.mult_mixed);
  read(doc, {"costs", "area_multipliers", "rural"}, c.costs.mult_rural);

  read(doc, {"voronoi", "threshold_m"}, c.reach_threshold_m);
  read(doc, {"voronoi", "hub_min_ports"}, c.hub_min_ports);

  read(doc, {"forecast", "base_year"}, c.base_year);
  read(doc, {"forecast", "years"}, c.years);
  if (doc.contains("forecast") && doc["forecast"].contains("envelope")) {
    c.envelope.clear();
    for (const auto& [year, cap] : doc["forecast"]["envelope"].items()) {
      int y = 0;
      try {
        y = std::stoi(year);
      } catch (const std::exception&) {
        throw ValidationError(kConfigFile, 0, "forecast.envelope." + year, "year key expected");
      }
      c.envelope[y] = cap.get<double>();
    }
  }

  read(doc, {"reports", "radii_m"}, c.radii_m);
  read(doc, {"reports", "area_samples"}, c.area_samples);
  read(doc, {"reports", "capacity", "base_year"}, c.capacity_base_year);
  read(doc, {"reports", "capacity", "target_year"}, c.capacity_target_year);
  read(doc, {"reports", "capacity", "dcfc_base"}, c.dcfc_base);
  read(doc, {"reports", "capacity", "dcfc_target"}, c.dcfc_target);
  read(doc, {"reports", "capacity", "l2_base"}, c.l2_base);
  read(doc, {"reports", "capacity", "l2_target"}, c.l2_target);

  std::string p;
  auto path_of = [&](const char* key, std::filesystem::path& out) {
    p = out.string();
    read(doc, {"inputs", key}, p);
    out = resolve(p, base_dir);
  };
  path_of("cells", c.inputs.cells);
  path_of("zones", c.inputs.zones);
  path_of("edges", c.inputs.edges);
  path_of("pois", c.inputs.pois);
  path_of("counties", c.inputs.counties);
  path_of("traffic", c.inputs.traffic);
  p = c.output_dir.string();
  read(doc, {"output_dir"}, p);
  c.output_dir = resolve(p, base_dir);
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError(kConfigFile, 0, assignment, "override must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ValidationError(kConfigFile, 0, key, "empty key segment");
    if (!node->is_object()) throw ValidationError(kConfigFile, 0, key, "path crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides) {
  json doc = json::object();
  std::filesystem::path base;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open config {}", path.string()));
    doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
      throw ValidationError(path.string(), 0, "", "config is not valid JSON");
    }
    base = path.parent_path();
  }
  // Paths may be redirected from the environment; nothing else is.
  if (const char* data = std::getenv("EVSITE_DATA_DIR"); data && *data) base = data;
  if (const char* out = std::getenv("EVSITE_OUT_DIR"); out && *out) doc["output_dir"] = out;
  for (const std::string& o : overrides) apply_override(doc, o);
  PipelineConfig c = config_from_json(doc, base);
  validate_config(c);
  return c;
}

void validate_config(const PipelineConfig& c) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw ValidationError(kConfigFile, 0, field, what);
  };
  if (c.stages != kStageOrder) {
    fail("stages", fmt::format("stages must be exactly [{}]; skipping or reordering is not allowed",
                               fmt::join(kStageOrder, ", ")));
  }
  try {
    (void)c.grid();
  } catch (const ValidationError& e) {
    fail("grid", e.what());
  }
  for (auto [field, res] : {std::pair{"grid.cell_resolution", c.cell_resolution},
                            std::pair{"grid.demand_resolution", c.demand_resolution},
                            std::pair{"grid.hub_resolution", c.hub_resolution}}) {
    if (res < kMinResolution || res > kMaxResolution) fail(field, "unsupported resolution");
  }
  if (!(c.hub_resolution < c.cell_resolution && c.cell_resolution < c.demand_resolution)) {
    fail("grid", "need hub_resolution < cell_resolution < demand_resolution");
  }
  if (!(c.tau > 0.0 && c.tau < 1.0)) fail("centrality.tau", "must lie in (0, 1)");
  if (c.hidden_dim < 1) fail("centrality.hidden_dim", "must be >= 1");
  if (!(c.learning_rate > 0.0)) fail("centrality.learning_rate", "must be > 0");
  if (c.epochs < 0) fail("centrality.epochs", "must be >= 0");
  for (auto [field, w] : {std::pair{"demand.w_pop", c.w_pop}, std::pair{"demand.w_poi", c.w_poi},
                          std::pair{"mclp.beta_poi", c.beta_poi},
                          std::pair{"mclp.beta_cent", c.beta_cent},
                          std::pair{"mclp.beta_cov", c.beta_cov}}) {
    if (!(w >= 0.0)) fail(field, "weights must be >= 0");
  }
  if (!(c.income_uplift >= 1.0)) fail("demand.income_uplift", "must be >= 1");
  try {
    PoiWeightTable table(c.poi_weights);
  } catch (const ValidationError& e) {
    fail("demand.poi_weights", e.what());
  }
  if (!(c.radius_m > 0.0)) fail("mclp.radius_m", "must be > 0");
  if (c.k < 1) fail("mclp.k", "must be >= 1");
  if (c.budget_p.has_value() == c.alpha.has_value()) {
    fail("mclp", "set exactly one of budget_p and alpha");
  }
  if (c.budget_p && *c.budget_p < 0) fail("mclp.budget_p", "must be >= 0");
  if (c.alpha && !(*c.alpha > 0.0 && *c.alpha <= 1.0)) fail("mclp.alpha", "must lie in (0, 1]");
  if (c.zone_cap && *c.zone_cap < 1) fail("mclp.zone_cap", "must be >= 1");
  if (!(c.utilisation_cap > 0.0 && c.utilisation_cap < 1.0)) {
    fail("queue.utilisation_cap", "must lie in (0, 1)");
  }
  if (!(c.mu_dcfc > 0.0)) fail("queue.mu_dcfc", "must be > 0");
  if (!(c.mu_l2 > 0.0)) fail("queue.mu_l2", "must be > 0");
  if (c.n_extra < 0) fail("queue.n_extra", "must be >= 0");
  if (c.c_max < 1) fail("queue.c_max", "must be >= 1");
  for (double v : {c.costs.dcfc_unit, c.costs.dcfc_install, c.costs.l2_unit, c.costs.l2_install,
                   c.costs.mult_urban, c.costs.mult_suburban, c.costs.mult_mixed,
                   c.costs.mult_rural}) {
    if (!(v >= 0.0)) fail("costs", "costs and multipliers must be >= 0");
  }
  if (!(c.reach_threshold_m > 0.0)) fail("voronoi.threshold_m", "must be > 0");
  if (c.hub_min_ports < 1 || c.hub_min_ports > c.c_max) {
    fail("voronoi.hub_min_ports", "must lie in [1, queue.c_max]");
  }
  if (c.years.empty()) fail("forecast.years", "at least one year is required");
  for (std::size_t i = 0; i < c.years.size(); ++i) {
    if (c.years[i] <= c.base_year) fail("forecast.years", "years must follow base_year");
    if (i > 0 && c.years[i] <= c.years[i - 1]) fail("forecast.years", "years must increase");
  }
  double prev = 0.0;
  for (const auto& [year, cap] : c.envelope) {
    if (!(cap >= 0.0 && cap <= 1.0)) fail("forecast.envelope", "caps must lie in [0, 1]");
    if (cap < prev) fail("forecast.envelope", "envelope must be non-decreasing");
    prev = cap;
  }
  if (c.radii_m.empty()) fail("reports.radii_m", "at least one radius is required");
  for (double r : c.radii_m) {
    if (!(r > 0.0)) fail("reports.radii_m", "radii must be > 0");
  }
  if (c.area_samples < 1) fail("reports.area_samples", "must be >= 1");
  if (c.capacity_target_year <= c.capacity_base_year) {
    fail("reports.capacity", "target_year must follow base_year");
  }
}

}  // namespace evsite
