#include "evsite/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "evsite/errors.hpp"

namespace evsite {

using nlohmann::json;

namespace {

std::vector<std::string> split_record(const std::string& line, const std::string& file,
                                      std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw ValidationError(file, lineno, "", "unterminated quoted field");
  out.push_back(std::move(field));
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return v.dump();
}

void write_json(std::string& out, const json& v, int depth, bool fixed) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // std::map order: sorted
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        write_json(out, it.value(), depth + 1, fixed || it.key() == "coordinates");
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Coordinate arrays stay on one line; everything else is one item per line.
      if (fixed) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out += ", ";
          write_json(out, v[i], depth, true);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_json(out, v[i], depth + 1, false);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float:
      out += fixed ? coord(v.get<double>()) : num(v.get<double>());
      return;
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      out += fixed ? coord(v.get<double>()) : v.dump();
      return;
    default:
      out += v.dump();
  }
}

}  // namespace

CsvTable CsvTable::read(const std::filesystem::path& path, bool allow_short) {
  return parse(read_text(path), path.filename().string(), allow_short);
}

CsvTable CsvTable::parse(const std::string& text, std::string name, bool allow_short) {
  CsvTable t;
  t.name_ = std::move(name);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_record(line, t.name_, lineno);
    for (auto& f : fields) f = trim(f);
    if (!have_header) {
      have_header = true;
      t.header_ = fields;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (!t.index_.emplace(fields[i], i).second) {
          throw ValidationError(t.name_, lineno, fields[i], "duplicate column");
        }
      }
      continue;
    }
    t.widths_.push_back(fields.size());
    if (allow_short && fields.size() < t.header_.size()) fields.resize(t.header_.size());
    if (fields.size() != t.header_.size()) {
      throw ValidationError(t.name_, lineno, "",
                            fmt::format("{} fields, header has {}", fields.size(), t.header_.size()));
    }
    t.rows_.push_back(std::move(fields));
    t.lines_.push_back(lineno);
  }
  if (!have_header) throw ValidationError(t.name_, 0, "", "file is empty (no header)");
  return t;
}

void CsvTable::require(std::initializer_list<const char*> columns) const {
  for (const char* c : columns) {
    if (!has(c)) throw ValidationError(name_, 1, c, "required column is missing");
  }
}

const std::string& CsvTable::text(std::size_t row, const std::string& column) const {
  const auto it = index_.find(column);
  if (it == index_.end()) throw ValidationError(name_, 1, column, "required column is missing");
  return rows_[row][it->second];
}

double CsvTable::number(std::size_t row, const std::string& column) const {
  const auto v = optional_number(row, column);
  if (!v) throw ValidationError(name_, lines_[row], column, "value is missing");
  return *v;
}

std::int64_t CsvTable::integer(std::size_t row, const std::string& column) const {
  const std::string& s = text(row, column);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(name_, lines_[row], column, fmt::format("'{}' is not an integer", s));
  }
  return v;
}

std::optional<double> CsvTable::optional_number(std::size_t row, const std::string& column) const {
  const std::string& s = text(row, column);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ValidationError(name_, lines_[row], column, fmt::format("'{}' is not a number", s));
  }
  return v;
}

std::vector<HexCell> read_cells(const std::filesystem::path& path, int resolution,
                                const GridSpec& spec) {
  const CsvTable t = CsvTable::read(path);
  t.require({"res", "q", "r", "lat", "lon", "population", "poi_score", "median_income", "ev_share",
             "zone_id"});
  std::vector<HexCell> out;
  std::set<HexIndex> seen;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const auto res = t.integer(i, "res");
    if (res != resolution) {
      throw ValidationError(t.name(), t.line(i), "res",
                            fmt::format("expected resolution {}, got {}", resolution, res));
    }
    HexCell c;
    c.index = {resolution, t.integer(i, "q"), t.integer(i, "r")};
    if (!seen.insert(c.index).second) {
      throw ValidationError(t.name(), t.line(i), "q", "duplicate cell");
    }
    c.centroid = centroid(c.index, spec);
    const LatLon stated{t.number(i, "lat"), t.number(i, "lon")};
    if (point_to_cell(stated, resolution, spec) != c.index) {
      throw ValidationError(t.name(), t.line(i), "lat",
                            fmt::format("lat/lon ({}, {}) fall outside cell ({}, {})", stated.lat,
                                        stated.lon, c.index.q, c.index.r));
    }
    c.population = t.number(i, "population");
    c.poi_score = t.number(i, "poi_score");
    c.median_income = t.number(i, "median_income");
    c.ev_share = t.number(i, "ev_share");
    c.zone_id = t.text(i, "zone_id");
    if (c.zone_id.empty()) throw ValidationError(t.name(), t.line(i), "zone_id", "value is missing");
    try {
      validate_cell(c);
    } catch (const ValidationError& e) {
      throw ValidationError(t.name(), t.line(i), "", e.what());
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Zone> read_zones(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  const json doc = json::parse(read_text(path), nullptr, false);
  if (doc.is_discarded()) throw ValidationError(name, 0, "", "not valid JSON");
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw ValidationError(name, 0, "type", "expected a GeoJSON FeatureCollection");
  }
  std::vector<Zone> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc["features"].size(); ++i) {
    const json& f = doc["features"][i];
    const std::string where = fmt::format("features[{}]", i);
    if (!f.contains("properties") || !f["properties"].is_object()) {
      throw ValidationError(name, 0, where + ".properties", "missing properties");
    }
    const json& props = f["properties"];
    Zone z;
    if (!props.contains("zone_id")) throw ValidationError(name, 0, where + ".zone_id", "missing");
    if (!props.contains("county_id")) throw ValidationError(name, 0, where + ".county_id", "missing");
    z.zone_id = id_string(props["zone_id"]);
    z.county_id = id_string(props["county_id"]);
    if (props.contains("area_type")) z.area_type = props["area_type"].get<std::string>();
    if (!ids.insert(z.zone_id).second) {
      throw ValidationError(name, 0, where + ".zone_id", "duplicate zone id " + z.zone_id);
    }
    const json& g = f.value("geometry", json());
    if (!g.is_object() || g.value("type", "") != "Polygon" || !g.contains("coordinates") ||
        g["coordinates"].empty()) {
      throw ValidationError(name, 0, where + ".geometry", "zones must be Polygon geometries");
    }
    for (const json& pt : g["coordinates"][0]) {
      if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw ValidationError(name, 0, where + ".geometry", "bad coordinate pair");
      }
      z.ring.push_back({pt[1].get<double>(), pt[0].get<double>()});
    }
    if (z.ring.size() >= 2 && z.ring.front().lat == z.ring.back().lat &&
        z.ring.front().lon == z.ring.back().lon) {
      z.ring.pop_back();
    }
    if (z.ring.size() < 3) {
      throw ValidationError(name, 0, where + ".geometry", "polygon has fewer than 3 vertices");
    }
    out.push_back(std::move(z));
  }
  return out;
}

std::vector<EdgeRecord> read_edges(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read(path);
  t.require({"zone_id", "node_a_id", "node_b_id", "lat_a", "lon_a", "lat_b", "lon_b"});
  std::vector<EdgeRecord> out;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    EdgeRecord e;
    e.zone_id = t.text(i, "zone_id");
    e.node_a = t.text(i, "node_a_id");
    e.node_b = t.text(i, "node_b_id");
    if (e.node_a.empty() || e.node_b.empty()) {
      throw ValidationError(t.name(), t.line(i), e.node_a.empty() ? "node_a_id" : "node_b_id",
                            "value is missing");
    }
    e.a = {t.number(i, "lat_a"), t.number(i, "lon_a")};
    e.b = {t.number(i, "lat_b"), t.number(i, "lon_b")};
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<PoiRecord> read_pois(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read(path);
  t.require({"lat", "lon", "canonical_class", "count"});
  std::vector<PoiRecord> out;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    PoiRecord p;
    p.record_id = fmt::format("{}:{}", t.name(), t.line(i));
    p.location = {t.number(i, "lat"), t.number(i, "lon")};
    p.canonical_class = t.text(i, "canonical_class");
    if (!is_poi_class(p.canonical_class)) {
      throw ValidationError(t.name(), t.line(i), "canonical_class",
                            fmt::format("unknown canonical class '{}'", p.canonical_class));
    }
    const auto count = t.integer(i, "count");
    if (count < 1) throw ValidationError(t.name(), t.line(i), "count", "count must be >= 1");
    p.count = static_cast<int>(count);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<CountyStats> read_counties(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read(path);
  t.require({"county_id", "ev_count", "vehicle_count", "share_2024", "share_2025",
             "avg_hourly_wage"});
  std::vector<CountyStats> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    CountyStats c;
    c.county_id = t.text(i, "county_id");
    if (!ids.insert(c.county_id).second) {
      throw ValidationError(t.name(), t.line(i), "county_id", "duplicate county");
    }
    c.ev_count = t.number(i, "ev_count");
    c.vehicle_count = t.number(i, "vehicle_count");
    c.share_2024 = t.number(i, "share_2024");
    c.share_2025 = t.number(i, "share_2025");
    c.avg_hourly_wage = t.number(i, "avg_hourly_wage");
    if (!(c.vehicle_count > 0.0)) {
      throw ValidationError(t.name(), t.line(i), "vehicle_count",
                            "total vehicles must be > 0 (β would divide by zero)");
    }
    if (!(c.ev_count >= 0.0) || c.ev_count > c.vehicle_count) {
      throw ValidationError(t.name(), t.line(i), "ev_count", "must lie in [0, vehicle_count]");
    }
    for (auto [field, v] : {std::pair{"share_2024", c.share_2024},
                            std::pair{"share_2025", c.share_2025}}) {
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(t.name(), t.line(i), field, "must lie in [0, 1]");
    }
    if (!(c.avg_hourly_wage >= 0.0)) {
      throw ValidationError(t.name(), t.line(i), "avg_hourly_wage", "must be >= 0");
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<TrafficRow> read_traffic(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read(path, true);
  t.require({"site_id"});
  std::vector<std::string> missing;
  for (int h = 0; h < 24; ++h) {
    if (!t.has(fmt::format("h{}", h))) missing.push_back(fmt::format("h{}", h));
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationError(t.name(), 1, missing.front(), "missing hourly columns: " + list);
  }
  std::vector<TrafficRow> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    TrafficRow row;
    row.site_id = t.text(i, "site_id");
    if (!ids.insert(row.site_id).second) {
      throw ValidationError(t.name(), t.line(i), "site_id", "duplicate site");
    }
    if (t.width(i) < t.header().size()) {
      std::vector<std::string> gone(t.header().begin() + static_cast<std::ptrdiff_t>(t.width(i)),
                                    t.header().end());
      std::string list;
      for (const auto& g : gone) list += (list.empty() ? "" : ", ") + g;
      throw ValidationError(t.name(), t.line(i), gone.front(),
                            fmt::format("row has {} of {} columns; missing {}", t.width(i),
                                        t.header().size(), list));
    }
    std::vector<std::optional<double>> counts;
    for (int h = 0; h < 24; ++h) counts.push_back(t.optional_number(i, fmt::format("h{}", h)));
    try {
      const ArrivalProfile p = arrival_rates(row.site_id, counts, 1.0);
      row.counts = p.counts;
    } catch (const ValidationError& e) {
      std::string field;
      for (int h = 0; h < 24 && field.empty(); ++h) {
        if (!counts[static_cast<std::size_t>(h)]) field = fmt::format("h{}", h);
      }
      throw ValidationError(t.name(), t.line(i), field, e.what());
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string num(double v) {
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{}", v);
}

std::string coord(double v) {
  std::string s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string dump_json(const json& doc) {
  std::string out;
  write_json(out, doc, 0, false);
  out += "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace evsite
