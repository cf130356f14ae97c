#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "itn/country.hpp"
#include "itn/error.hpp"
#include "itn/geo.hpp"
#include "itn/gravity/design.hpp"
#include "itn/network.hpp"

namespace itn::io {

/// One parsed CSV file: header names plus data rows tagged with their line.
struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    return std::nullopt;
  }

  std::size_t require(std::string_view name) const {
    auto k = column(name);
    if (!k) throw ParseError(path, 1, "missing column '" + std::string(name) + "'");
    return *k;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Splits one record; double quotes group fields and "" escapes a quote.
inline std::vector<std::string> split_record(const std::string& line, const std::string& path, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += ch;
    }
  }
  if (quoted) throw ParseError(path, lineno, "unterminated quoted field");
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

}  // namespace detail

inline CsvTable parse_csv(std::istream& in, const std::string& path) {
  CsvTable t;
  t.path = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty() || line[0] == '#') continue;
    auto fields = detail::split_record(line, path, lineno);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw ParseError(path, lineno, "expected " + std::to_string(t.header.size()) + " fields, found " +
                                         std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.lines.push_back(lineno);
  }
  if (t.header.empty()) throw ParseError(path, lineno, "empty file");
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_csv(in, path);
}

namespace detail {

inline double parse_double(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ParseError(t.path, t.lines[row], "column '" + t.header[col] + "': not a number: '" + s + "'");
  return v;
}

inline std::optional<double> parse_optional(const CsvTable& t, std::size_t row, std::size_t col) {
  if (t.rows[row][col].empty()) return std::nullopt;
  return parse_double(t, row, col);
}

inline int parse_int(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw ParseError(t.path, t.lines[row], "column '" + t.header[col] + "': not an integer: '" + s + "'");
  return v;
}

inline double parse_dummy(const CsvTable& t, std::size_t row, std::size_t col) {
  const double v = parse_double(t, row, col);
  if (v != 0.0 && v != 1.0)
    throw ParseError(t.path, t.lines[row], "column '" + t.header[col] + "' must be 0 or 1");
  return v;
}

inline std::size_t country_index(const CountryTable& countries, const CsvTable& t, std::size_t row, std::size_t col) {
  const int id = parse_int(t, row, col);
  auto k = countries.find(id);
  if (!k) throw ParseError(t.path, t.lines[row], "unknown country id " + std::to_string(id));
  return *k;
}

}  // namespace detail

inline CountryTable parse_countries(const CsvTable& t) {
  const auto c_id = t.require("id"), c_acr = t.require("acronym"), c_name = t.require("name"),
             c_gdp = t.require("gdp"), c_pop = t.require("population"), c_area = t.require("area_km2"),
             c_ll = t.require("landlocked"), c_cont = t.require("continent"), c_reg = t.require("region"),
             c_cpi = t.require("cpi"), c_lat = t.require("latitude"), c_lon = t.require("longitude");
  std::vector<Country> list;
  std::set<int> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Country c;
    c.id = detail::parse_int(t, r, c_id);
    if (!seen.insert(c.id).second) throw ParseError(t.path, t.lines[r], "duplicate country id " + std::to_string(c.id));
    c.acronym = t.rows[r][c_acr];
    c.name = t.rows[r][c_name];
    c.gdp = detail::parse_double(t, r, c_gdp);
    c.population = detail::parse_double(t, r, c_pop);
    c.area_km2 = detail::parse_double(t, r, c_area);
    c.landlocked = detail::parse_dummy(t, r, c_ll) == 1.0;
    c.continent = t.rows[r][c_cont];
    c.region = t.rows[r][c_reg];
    c.cpi = detail::parse_double(t, r, c_cpi);
    c.latitude = detail::parse_optional(t, r, c_lat);
    c.longitude = detail::parse_optional(t, r, c_lon);
    if (c.latitude && std::abs(*c.latitude) > 90.0) throw ParseError(t.path, t.lines[r], "latitude out of range");
    if (c.longitude && std::abs(*c.longitude) > 360.0) throw ParseError(t.path, t.lines[r], "longitude out of range");
    if (c.gdp < 0.0 || c.population < 0.0 || c.area_km2 < 0.0)
      throw ParseError(t.path, t.lines[r], "negative gdp, population or area");
    list.push_back(std::move(c));
  }
  if (list.empty()) throw ParseError(t.path, 1, "no countries");
  return CountryTable(std::move(list));
}

/// Flows for one year. Rows of other years are skipped; a year with no rows is an error.
inline DirectedFlowMatrix parse_flows(const CsvTable& t, const CountryTable& countries, int year) {
  const auto c_exp = t.require("exporter_id"), c_imp = t.require("importer_id"), c_year = t.require("year"),
             c_val = t.require("value");
  const auto n = static_cast<Eigen::Index>(countries.size());
  Matrix m = Matrix::Zero(n, n);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t used = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (detail::parse_int(t, r, c_year) != year) continue;
    const auto i = detail::country_index(countries, t, r, c_exp);
    const auto j = detail::country_index(countries, t, r, c_imp);
    if (i == j) throw ParseError(t.path, t.lines[r], "exporter equals importer");
    if (!seen.emplace(i, j).second) throw ParseError(t.path, t.lines[r], "duplicate flow for this exporter/importer/year");
    const double v = detail::parse_double(t, r, c_val);
    if (v < 0.0) throw ParseError(t.path, t.lines[r], "negative flow value");
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    ++used;
  }
  if (used == 0) throw ParseError(t.path, 1, "no flows for year " + std::to_string(year));
  return DirectedFlowMatrix(std::move(m), year);
}

inline gravity::DyadCovariates parse_dyads(const CsvTable& t, const CountryTable& countries) {
  const auto c_a = t.require("id_a"), c_b = t.require("id_b"), c_dist = t.require("distance_km"),
             c_ctg = t.require("contiguity"), c_comc = t.require("common_currency"),
             c_coml = t.require("common_language"), c_col = t.require("colony"), c_ta = t.require("trade_agreement"),
             c_comr = t.require("common_religion"), c_exc = t.require("exchange_rate");
  gravity::DyadCovariates cov(countries.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int id_a = detail::parse_int(t, r, c_a), id_b = detail::parse_int(t, r, c_b);
    if (id_a >= id_b) throw ParseError(t.path, t.lines[r], "id_a must be smaller than id_b");
    const auto a = detail::country_index(countries, t, r, c_a);
    const auto b = detail::country_index(countries, t, r, c_b);
    if (cov.has(a, b)) throw ParseError(t.path, t.lines[r], "duplicate dyad " + std::to_string(id_a) + "," + std::to_string(id_b));
    gravity::DyadRecord rec;
    rec.distance_km = detail::parse_optional(t, r, c_dist);
    if (rec.distance_km && !(*rec.distance_km > 0.0)) throw ParseError(t.path, t.lines[r], "distance must be positive");
    rec.contiguity = detail::parse_dummy(t, r, c_ctg);
    rec.common_currency = detail::parse_dummy(t, r, c_comc);
    rec.common_language = detail::parse_dummy(t, r, c_coml);
    rec.colony = detail::parse_dummy(t, r, c_col);
    rec.trade_agreement = detail::parse_dummy(t, r, c_ta);
    rec.common_religion = detail::parse_dummy(t, r, c_comr);
    rec.exchange_rate = detail::parse_double(t, r, c_exc);
    cov.set(a, b, rec);
  }
  return cov;
}

/// Overrides dyad distances from an `id_a,id_b,distance_km` file.
inline void apply_distance_file(const CsvTable& t, const CountryTable& countries, gravity::DyadCovariates& cov) {
  const auto c_a = t.require("id_a"), c_b = t.require("id_b"), c_d = t.require("distance_km");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto a = detail::country_index(countries, t, r, c_a);
    auto b = detail::country_index(countries, t, r, c_b);
    if (a == b) throw ParseError(t.path, t.lines[r], "distance from a country to itself");
    if (a > b) std::swap(a, b);
    if (!seen.emplace(a, b).second) throw ParseError(t.path, t.lines[r], "duplicate distance pair");
    const double d = detail::parse_double(t, r, c_d);
    if (!(d > 0.0)) throw ParseError(t.path, t.lines[r], "distance must be positive");
    if (!cov.has(a, b)) continue;
    cov.get(a, b)->distance_km = d;
  }
}

/// Fills missing dyad distances from coordinates. Returns the number filled.
inline std::size_t fill_great_circle(const CountryTable& countries, gravity::DyadCovariates& cov) {
  std::size_t filled = 0;
  for (std::size_t a = 0; a < countries.size(); ++a)
    for (std::size_t b = a + 1; b < countries.size(); ++b) {
      auto& rec = cov.get(a, b);
      if (!rec || rec->distance_km) continue;
      const auto& ca = countries[a];
      const auto& cb = countries[b];
      if (!ca.has_coordinates() || !cb.has_coordinates()) continue;
      rec->distance_km = std::max(great_circle_km(*ca.latitude, *ca.longitude, *cb.latitude, *cb.longitude), 1.0);
      ++filled;
    }
  return filled;
}

struct InputPaths {
  std::string flows;
  std::string countries;
  std::string dyads;
  std::string distances;  // optional
};

struct IngestResult {
  CountryTable countries;
  DirectedFlowMatrix flows;
  gravity::DyadCovariates covariates;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
};

inline IngestResult ingest(const InputPaths& paths, int year) {
  IngestResult out;
  out.countries = parse_countries(read_csv(paths.countries));
  out.flows = parse_flows(read_csv(paths.flows), out.countries, year);
  out.covariates = parse_dyads(read_csv(paths.dyads), out.countries);
  if (!paths.distances.empty()) apply_distance_file(read_csv(paths.distances), out.countries, out.covariates);
  const std::size_t filled = fill_great_circle(out.countries, out.covariates);
  if (filled > 0) out.notes.push_back(std::to_string(filled) + " dyad distances computed from coordinates");
  std::size_t missing = 0;
  for (std::size_t a = 0; a < out.countries.size(); ++a)
    for (std::size_t b = a + 1; b < out.countries.size(); ++b)
      if (!out.covariates.has(a, b)) ++missing;
  if (missing > 0) out.warnings.push_back(std::to_string(missing) + " country pairs have no dyad record");
  return out;
}

}  // namespace itn::io
