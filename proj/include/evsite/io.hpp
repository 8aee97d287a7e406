#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evsite/demand.hpp"
#include "evsite/forecast.hpp"
#include "evsite/hexgrid.hpp"
#include "evsite/roadgraph.hpp"

namespace evsite {

// Header-addressed CSV table. Fields are split on commas with RFC 4180
// quoting; CRLF is accepted.
class CsvTable {
 public:
  // With `allow_short`, rows with fewer fields than the header are padded
  // with empty strings instead of rejected; width(row) keeps the real count.
  static CsvTable read(const std::filesystem::path& path, bool allow_short = false);
  static CsvTable parse(const std::string& text, std::string name, bool allow_short = false);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  // 1-based line number in the file for data row i.
  std::size_t line(std::size_t row) const { return lines_[row]; }
  std::size_t width(std::size_t row) const { return widths_[row]; }
  bool has(const std::string& column) const { return index_.contains(column); }

  // Throws ValidationError naming the first missing column.
  void require(std::initializer_list<const char*> columns) const;

  const std::string& text(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;
  std::int64_t integer(std::size_t row, const std::string& column) const;
  std::optional<double> optional_number(std::size_t row, const std::string& column) const;

 private:
  std::string name_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
  std::vector<std::size_t> widths_;
};

struct Zone {
  std::string zone_id;
  std::string county_id;
  std::string area_type = "urban";
  std::vector<LatLon> ring;  // outer ring, closing vertex dropped
};

struct TrafficRow {
  std::string site_id;
  std::array<double, 24> counts{};
};

std::vector<HexCell> read_cells(const std::filesystem::path& path, int resolution,
                                const GridSpec& spec);
std::vector<Zone> read_zones(const std::filesystem::path& path);
std::vector<EdgeRecord> read_edges(const std::filesystem::path& path);
std::vector<PoiRecord> read_pois(const std::filesystem::path& path);
std::vector<CountyStats> read_counties(const std::filesystem::path& path);
std::vector<TrafficRow> read_traffic(const std::filesystem::path& path);

// JSON with sorted keys, two-space indent and LF endings. Values under a
// "coordinates" key are printed with exactly six decimals.
std::string dump_json(const nlohmann::json& doc);

// Formats a double with the shortest round-trip representation.
std::string num(double v);
std::string coord(double v);  // fixed six decimals

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace evsite
