#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "itn/country.hpp"
#include "itn/error.hpp"
#include "itn/network.hpp"

namespace itn::stats {

/// Within/between macro-area trade percentages.
/// `percent[r][s]` is the share (in %) of area r's total trade exchanged with
/// area s; each row sums to 100. `world_share[r]` is area r's share of the
/// world total. Trade between i and j counts as exports_ij + exports_ji.
struct AreaShares {
  std::vector<std::string> regions;  // in order of first appearance in the country table
  std::vector<std::vector<double>> percent;
  std::vector<double> world_share;
  std::vector<double> total_trade;  // absolute, per area
};

inline AreaShares area_trade_shares(const DirectedFlowMatrix& flows, const CountryTable& countries) {
  if (flows.size() != countries.size())
    throw InvalidArgument("area_trade_shares: flow matrix and country table sizes differ");
  std::vector<std::string> unmapped;
  AreaShares out;
  std::vector<std::size_t> region_of(countries.size());
  for (std::size_t k = 0; k < countries.size(); ++k) {
    const auto& region = countries[k].region;
    if (region.empty()) {
      unmapped.push_back(std::to_string(countries[k].id));
      continue;
    }
    auto it = std::find(out.regions.begin(), out.regions.end(), region);
    region_of[k] = static_cast<std::size_t>(it - out.regions.begin());
    if (it == out.regions.end()) out.regions.push_back(region);
  }
  if (!unmapped.empty()) {
    std::string msg = "area_trade_shares: countries without a region:";
    for (const auto& id : unmapped) msg += " " + id;
    throw InvalidArgument(msg);
  }

  const std::size_t r = out.regions.size();
  std::vector<std::vector<double>> trade(r, std::vector<double>(r, 0.0));
  for (std::size_t i = 0; i < countries.size(); ++i)
    for (std::size_t j = 0; j < countries.size(); ++j)
      if (i != j) trade[region_of[i]][region_of[j]] += flows(i, j) + flows(j, i);

  double world = 0.0;
  out.total_trade.assign(r, 0.0);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < r; ++b) out.total_trade[a] += trade[a][b];
    world += out.total_trade[a];
  }
  out.percent.assign(r, std::vector<double>(r, 0.0));
  out.world_share.assign(r, 0.0);
  for (std::size_t a = 0; a < r; ++a) {
    if (out.total_trade[a] > 0.0)
      for (std::size_t b = 0; b < r; ++b) out.percent[a][b] = 100.0 * trade[a][b] / out.total_trade[a];
    if (world > 0.0) out.world_share[a] = 100.0 * out.total_trade[a] / world;
  }
  return out;
}

}  // namespace itn::stats
