#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "itn/country.hpp"
#include "itn/error.hpp"
#include "itn/network.hpp"

namespace itn::gravity {

/// Link-level covariates for one unordered country pair.
struct DyadRecord {
  std::optional<double> distance_km;
  double contiguity = 0.0;
  double common_currency = 0.0;
  double common_language = 0.0;
  double colony = 0.0;
  double trade_agreement = 0.0;
  double common_religion = 0.0;
  double exchange_rate = 0.0;
};

/// Covariate records for the unordered pairs of an n-country index.
/// Pairs without a record are treated as missing.
class DyadCovariates {
public:
  DyadCovariates() = default;
  explicit DyadCovariates(std::size_t n) : n_(n), records_(n * (n > 0 ? n - 1 : 0) / 2) {}

  std::size_t size() const noexcept { return n_; }

  void set(std::size_t a, std::size_t b, DyadRecord rec) { records_.at(slot(a, b)) = rec; }
  bool has(std::size_t a, std::size_t b) const { return records_.at(slot(a, b)).has_value(); }
  const std::optional<DyadRecord>& get(std::size_t a, std::size_t b) const { return records_.at(slot(a, b)); }
  std::optional<DyadRecord>& get(std::size_t a, std::size_t b) { return records_.at(slot(a, b)); }

  /// Symmetric km distance matrix; NaN where unknown, 0 on the diagonal.
  Matrix distance_matrix() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix d = Matrix::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t a = 0; a < n_; ++a) {
      d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = 0.0;
      for (std::size_t b = a + 1; b < n_; ++b) {
        const auto& rec = records_[slot(a, b)];
        if (rec && rec->distance_km) {
          d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = *rec->distance_km;
          d(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = *rec->distance_km;
        }
      }
    }
    return d;
  }

private:
  std::size_t slot(std::size_t a, std::size_t b) const {
    if (a == b || a >= n_ || b >= n_) throw InvalidArgument("dyad index out of range");
    if (a > b) std::swap(a, b);
    return a * n_ - a * (a + 1) / 2 + (b - a - 1);
  }

  std::size_t n_ = 0;
  std::vector<std::optional<DyadRecord>> records_;
};

/// GDP-share weighted mean distance of each country to all others:
/// RM_i = sum_{j != i} GDP_j / (sum_{k != i} GDP_k) * DIST_ij.
/// With `skip_missing`, pairs with unknown distance are left out and the
/// GDP shares renormalized over the remaining partners.
inline Vector compute_remoteness(const CountryTable& countries, const Matrix& distances, bool skip_missing = false) {
  const std::size_t n = countries.size();
  if (n < 2) throw InvalidArgument("compute_remoteness needs at least two countries");
  if (static_cast<std::size_t>(distances.rows()) != n || static_cast<std::size_t>(distances.cols()) != n)
    throw InvalidArgument("compute_remoteness: distance matrix does not match the country table");
  Vector rm = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double g = countries[j].gdp;
      if (!(d > 0.0) || !(g > 0.0)) {
        if (skip_missing) continue;
        throw InvalidArgument("compute_remoteness: distances and GDPs must be positive");
      }
      num += g * d;
      den += g;
    }
    rm(static_cast<Eigen::Index>(i)) = den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
  }
  return rm;
}

enum class FixedEffects { none, country };

enum class ColumnRole { constant, fixed_effect, regressor };

struct DesignColumn {
  std::string name;   // machine name, e.g. "log_gdp_i"
  std::string label;  // display label, e.g. "Log GDP_i"
  std::string block;  // selection block, e.g. "GDP"
  ColumnRole role = ColumnRole::regressor;
};

/// Unordered pair stored with i > j (i is the higher country index).
struct Dyad {
  std::size_t i = 0;
  std::size_t j = 0;
};

struct RejectedDyad {
  std::size_t i = 0;
  std::size_t j = 0;
  std::string reason;
};

/// Regression design: one row per retained dyad.
struct CovariateSet {
  std::size_t n_countries = 0;
  std::size_t total_dyads = 0;  // n(n-1)/2 before rejections
  std::vector<Dyad> dyads;
  Vector response;
  Matrix x;
  std::vector<DesignColumn> columns;
  std::vector<RejectedDyad> rejected;
  std::vector<std::string> notes;
  FixedEffects fixed_effects = FixedEffects::country;

  std::size_t rows() const noexcept { return dyads.size(); }

  std::optional<std::size_t> find_column(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (columns[k].name == name) return k;
    return std::nullopt;
  }

  /// Droppable regressor blocks in column order.
  std::vector<std::string> blocks() const {
    std::vector<std::string> out;
    for (const auto& c : columns)
      if (c.role == ColumnRole::regressor && std::find(out.begin(), out.end(), c.block) == out.end())
        out.push_back(c.block);
    return out;
  }

  /// Copy without the columns of the given regressor blocks.
  CovariateSet without_blocks(const std::set<std::string>& dropped) const {
    CovariateSet out = *this;
    std::vector<Eigen::Index> keep;
    out.columns.clear();
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k].role == ColumnRole::regressor && dropped.count(columns[k].block)) continue;
      keep.push_back(static_cast<Eigen::Index>(k));
      out.columns.push_back(columns[k]);
    }
    out.x.resize(x.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) out.x.col(static_cast<Eigen::Index>(c)) = x.col(keep[c]);
    return out;
  }
};

/// Regressor blocks of the gravity equation. Country-level blocks carry an
/// i and a j column; CONT carries one dummy per non-reference continent per side.
inline const std::vector<std::string>& all_blocks() {
  static const std::vector<std::string> blocks{"GDP", "DIST", "AREA", "POP", "CPI", "EXC", "RM", "LL",
                                               "CONT", "CTG", "COMC", "COML", "COL", "TA", "COMR"};
  return blocks;
}

inline bool is_country_level_block(const std::string& block) {
  static const std::set<std::string> country{"GDP", "AREA", "POP", "CPI", "RM", "LL", "CONT"};
  return country.count(block) > 0;
}

struct DesignOptions {
  FixedEffects fixed_effects = FixedEffects::country;
  std::vector<std::string> blocks = all_blocks();
};

/// Assembles the gravity design over all unordered pairs.
///
/// Logs are applied to GDP, DIST, AREA, POP and RM. Dyads whose countries
/// lack positive GDP/population/area, or that have no covariate record or
/// distance, are dropped and listed in `rejected`.
///
/// Country fixed effects enter as one presence column per country (value 1
/// when the country is either end of the dyad) next to a constant, with the
/// first retained country as reference. Under fixed effects the i+j sum of
/// any country-level regressor lies in the span of the presence columns, so
/// country-level blocks are reported as absorbed and left out. Regressor
/// columns are kept even when they do not vary; the estimators omit those.
inline CovariateSet build_design(const CountryTable& countries, const DyadCovariates& covariates,
                                 const Matrix& response, const DesignOptions& options = {}) {
  const std::size_t n = countries.size();
  if (covariates.size() != n) throw InvalidArgument("build_design: covariates do not match the country table");
  if (static_cast<std::size_t>(response.rows()) != n || static_cast<std::size_t>(response.cols()) != n)
    throw InvalidArgument("build_design: response does not match the country table");

  CovariateSet set;
  set.n_countries = n;
  set.total_dyads = n * (n > 0 ? n - 1 : 0) / 2;
  set.fixed_effects = options.fixed_effects;
  std::set<std::string> blocks;
  for (const auto& b : options.blocks) {
    if (std::find(all_blocks().begin(), all_blocks().end(), b) == all_blocks().end())
      throw InvalidArgument("build_design: unknown regressor block " + b);
    if (options.fixed_effects == FixedEffects::country && is_country_level_block(b)) {
      set.notes.push_back(b + " absorbed by country fixed effects; omitted");
      continue;
    }
    blocks.insert(b);
  }

  // Retained dyads.
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto& ci = countries[i];
      const auto& cj = countries[j];
      std::string reason;
      if (!ci.usable_for_estimation() || !cj.usable_for_estimation()) {
        reason = "country without positive GDP, population or area";
      } else if (!covariates.has(i, j)) {
        reason = "no covariate record";
      } else if (!covariates.get(i, j)->distance_km) {
        reason = "no distance";
      } else if (!(*covariates.get(i, j)->distance_km > 0.0)) {
        reason = "nonpositive distance";
      } else if (blocks.count("CPI") && (!std::isfinite(ci.cpi) || !std::isfinite(cj.cpi))) {
        reason = "missing CPI";
      }
      const double y = response(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (reason.empty() && (!std::isfinite(y) || y < 0.0)) reason = "invalid response";
      if (!reason.empty()) {
        set.rejected.push_back({i, j, reason});
        continue;
      }
      set.dyads.push_back({i, j});
    }
  }

  std::vector<std::string> continents;
  if (blocks.count("CONT")) {
    std::set<std::string> seen;
    for (const auto& c : countries) seen.insert(c.continent);
    continents.assign(seen.begin(), seen.end());
    if (!continents.empty()) continents.erase(continents.begin());  // reference continent
  }

  Vector remoteness;
  if (blocks.count("RM")) remoteness = compute_remoteness(countries, covariates.distance_matrix(), true);

  // Columns.
  auto add = [&](std::string name, std::string label, std::string block, ColumnRole role) {
    set.columns.push_back({std::move(name), std::move(label), std::move(block), role});
  };
  add("const", "Constant", "FE", ColumnRole::constant);
  if (blocks.count("GDP")) {
    add("log_gdp_i", "Log GDP_i", "GDP", ColumnRole::regressor);
    add("log_gdp_j", "Log GDP_j", "GDP", ColumnRole::regressor);
  }
  if (blocks.count("DIST")) add("log_dist", "Log DIST", "DIST", ColumnRole::regressor);
  if (blocks.count("AREA")) {
    add("log_area_i", "Log AREA_i", "AREA", ColumnRole::regressor);
    add("log_area_j", "Log AREA_j", "AREA", ColumnRole::regressor);
  }
  if (blocks.count("POP")) {
    add("log_pop_i", "Log POP_i", "POP", ColumnRole::regressor);
    add("log_pop_j", "Log POP_j", "POP", ColumnRole::regressor);
  }
  if (blocks.count("CPI")) {
    add("cpi_i", "CPI_i", "CPI", ColumnRole::regressor);
    add("cpi_j", "CPI_j", "CPI", ColumnRole::regressor);
  }
  if (blocks.count("EXC")) add("exc", "EXC", "EXC", ColumnRole::regressor);
  if (blocks.count("RM")) {
    add("log_rm_i", "Log RM_i", "RM", ColumnRole::regressor);
    add("log_rm_j", "Log RM_j", "RM", ColumnRole::regressor);
  }
  if (blocks.count("LL")) {
    add("ll_i", "LL_i", "LL", ColumnRole::regressor);
    add("ll_j", "LL_j", "LL", ColumnRole::regressor);
  }
  for (const auto& c : continents) add("cont_i:" + c, "CONT_i " + c, "CONT", ColumnRole::regressor);
  for (const auto& c : continents) add("cont_j:" + c, "CONT_j " + c, "CONT", ColumnRole::regressor);
  for (const auto* b : {"CTG", "COMC", "COML", "COL", "TA", "COMR"}) {
    if (!blocks.count(b)) continue;
    std::string lower(b);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    add(lower, b, b, ColumnRole::regressor);
  }

  std::vector<std::size_t> fe_country;
  if (options.fixed_effects == FixedEffects::country) {
    std::vector<bool> present(n, false);
    for (const auto& d : set.dyads) present[d.i] = present[d.j] = true;
    bool reference_taken = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (!present[k]) continue;
      if (!reference_taken) {
        reference_taken = true;
        set.notes.push_back("fixed-effect reference country: " + countries[k].acronym);
        continue;
      }
      const std::string tag = countries[k].acronym.empty() ? std::to_string(countries[k].id) : countries[k].acronym;
      add("fe:" + tag, "C " + tag, "FE", ColumnRole::fixed_effect);
      fe_country.push_back(k);
    }
  }

  const auto rows = static_cast<Eigen::Index>(set.dyads.size());
  set.x = Matrix::Zero(rows, static_cast<Eigen::Index>(set.columns.size()));
  set.response.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& d = set.dyads[static_cast<std::size_t>(r)];
    const auto& ci = countries[d.i];
    const auto& cj = countries[d.j];
    const auto& rec = *covariates.get(d.i, d.j);
    set.response(r) = response(static_cast<Eigen::Index>(d.i), static_cast<Eigen::Index>(d.j));
    Eigen::Index c = 0;
    set.x(r, c++) = 1.0;
    if (blocks.count("GDP")) {
      set.x(r, c++) = std::log(ci.gdp);
      set.x(r, c++) = std::log(cj.gdp);
    }
    if (blocks.count("DIST")) set.x(r, c++) = std::log(*rec.distance_km);
    if (blocks.count("AREA")) {
      set.x(r, c++) = std::log(ci.area_km2);
      set.x(r, c++) = std::log(cj.area_km2);
    }
    if (blocks.count("POP")) {
      set.x(r, c++) = std::log(ci.population);
      set.x(r, c++) = std::log(cj.population);
    }
    if (blocks.count("CPI")) {
      set.x(r, c++) = ci.cpi;
      set.x(r, c++) = cj.cpi;
    }
    if (blocks.count("EXC")) set.x(r, c++) = rec.exchange_rate;
    if (blocks.count("RM")) {
      set.x(r, c++) = std::log(remoteness(static_cast<Eigen::Index>(d.i)));
      set.x(r, c++) = std::log(remoteness(static_cast<Eigen::Index>(d.j)));
    }
    if (blocks.count("LL")) {
      set.x(r, c++) = ci.landlocked ? 1.0 : 0.0;
      set.x(r, c++) = cj.landlocked ? 1.0 : 0.0;
    }
    for (const auto& cont : continents) set.x(r, c++) = ci.continent == cont ? 1.0 : 0.0;
    for (const auto& cont : continents) set.x(r, c++) = cj.continent == cont ? 1.0 : 0.0;
    if (blocks.count("CTG")) set.x(r, c++) = rec.contiguity;
    if (blocks.count("COMC")) set.x(r, c++) = rec.common_currency;
    if (blocks.count("COML")) set.x(r, c++) = rec.common_language;
    if (blocks.count("COL")) set.x(r, c++) = rec.colony;
    if (blocks.count("TA")) set.x(r, c++) = rec.trade_agreement;
    if (blocks.count("COMR")) set.x(r, c++) = rec.common_religion;
    for (auto k : fe_country) set.x(r, c++) = (d.i == k || d.j == k) ? 1.0 : 0.0;
  }

  return set;
}

}  // namespace itn::gravity
