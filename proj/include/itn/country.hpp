#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "itn/error.hpp"

namespace itn {

struct Country {
  int id = 0;
  std::string acronym;
  std::string name;
  double gdp = 0.0;
  double population = 0.0;
  double area_km2 = 0.0;
  bool landlocked = false;
  std::string continent;
  std::string region;  // macro-area used for within/between trade shares
  double cpi = 0.0;
  std::optional<double> latitude;
  std::optional<double> longitude;

  double gdp_per_capita() const { return population > 0.0 ? gdp / population : 0.0; }
  bool has_coordinates() const { return latitude.has_value() && longitude.has_value(); }
  bool usable_for_estimation() const { return gdp > 0.0 && population > 0.0 && area_km2 > 0.0; }
};

/// Ordered set of countries. The order is the index every matrix in an analysis refers to.
class CountryTable {
public:
  CountryTable() = default;

  explicit CountryTable(std::vector<Country> entries) : entries_(std::move(entries)) {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      auto [it, inserted] = index_.emplace(entries_[k].id, k);
      if (!inserted)
        throw InvalidArgument("duplicate country id " + std::to_string(entries_[k].id));
    }
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const Country& operator[](std::size_t k) const { return entries_[k]; }
  const std::vector<Country>& entries() const noexcept { return entries_; }

  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::optional<std::size_t> find(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(int id) const {
    auto k = find(id);
    if (!k) throw InvalidArgument("unknown country id " + std::to_string(id));
    return *k;
  }

  std::vector<double> gdp_per_capita() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& c : entries_) out.push_back(c.gdp_per_capita());
    return out;
  }

private:
  std::vector<Country> entries_;
  std::map<int, std::size_t> index_;
};

}  // namespace itn
