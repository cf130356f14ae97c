#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>

#include "itn/country.hpp"
#include "itn/geo.hpp"
#include "itn/gravity/design.hpp"
#include "itn/network.hpp"

// Seeded gravity world with known coefficients, used by the tests, the
// acceptance checks and the `synth` subcommand.

namespace itn::synthetic {

struct WorldOptions {
  std::size_t countries = 50;
  std::uint64_t seed = 1;
  int year = 2000;
  double noise_sigma = 0.5;  // sd of the log of the unit-mean multiplicative noise
  bool structural_zeros = true;
  double zero_intercept = -9.8;   // logit P(zero) = a + b log DIST - c (log GDP_i + log GDP_j - centre)
  double zero_distance = 1.1;
  double zero_mass = 0.6;
  double constant = -12.0;
  double gdp_elasticity = 1.0;
  double distance_elasticity = -0.9;
  double contiguity = 0.6;
  double common_language = 0.4;
  double colony = 0.3;
  double trade_agreement = 0.5;
  double landlocked = -0.4;
};

struct World {
  CountryTable countries;
  gravity::DyadCovariates covariates;
  DirectedFlowMatrix flows;
  Matrix mean;  // symmetric expected flow (zero stage excluded)
  std::map<std::string, double> truth;  // design column name -> coefficient
};

inline World make_world(const WorldOptions& opt = {}) {
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto bernoulli = [&](double p) { return unit(rng) < p; };

  static const char* regions[] = {"Americas", "Europe", "Asia", "Africa"};
  static const double centre_lat[] = {15.0, 50.0, 30.0, 0.0};
  static const double centre_lon[] = {-80.0, 10.0, 100.0, 20.0};

  const std::size_t n = opt.countries;
  std::vector<Country> list;
  list.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Country c;
    c.id = static_cast<int>(k + 1);
    char buf[32];
    std::snprintf(buf, sizeof buf, "C%03zu", k + 1);
    c.acronym = buf;
    c.name = "Country " + std::to_string(k + 1);
    const std::size_t r = k % 4;
    c.region = regions[r];
    c.continent = regions[r];
    c.gdp = std::exp(11.5 + 1.5 * normal(rng));
    c.population = std::exp(15.5 + 1.2 * normal(rng));
    c.area_km2 = std::exp(11.0 + 1.3 * normal(rng));
    c.landlocked = bernoulli(0.2);
    c.cpi = 100.0 + 10.0 * normal(rng);
    c.latitude = std::clamp(centre_lat[r] + 12.0 * normal(rng), -80.0, 80.0);
    c.longitude = centre_lon[r] + 20.0 * normal(rng);
    list.push_back(std::move(c));
  }
  World w;
  w.countries = CountryTable(std::move(list));
  w.covariates = gravity::DyadCovariates(n);

  double centre = 0.0;
  for (const auto& c : w.countries) centre += 2.0 * std::log(c.gdp) / static_cast<double>(n);

  const auto nn = static_cast<Eigen::Index>(n);
  w.mean = Matrix::Zero(nn, nn);
  Matrix flows = Matrix::Zero(nn, nn);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& ca = w.countries[a];
      const auto& cb = w.countries[b];
      gravity::DyadRecord rec;
      const double dist = std::max(great_circle_km(*ca.latitude, *ca.longitude, *cb.latitude, *cb.longitude), 50.0);
      rec.distance_km = dist;
      rec.contiguity = dist < 1500.0 && bernoulli(0.6) ? 1.0 : 0.0;
      rec.common_language = bernoulli(ca.region == cb.region ? 0.35 : 0.08) ? 1.0 : 0.0;
      rec.colony = bernoulli(0.05) ? 1.0 : 0.0;
      rec.trade_agreement = bernoulli(ca.region == cb.region ? 0.4 : 0.1) ? 1.0 : 0.0;
      rec.common_currency = bernoulli(0.04) ? 1.0 : 0.0;
      rec.common_religion = bernoulli(0.3) ? 1.0 : 0.0;
      rec.exchange_rate = normal(rng);
      w.covariates.set(a, b, rec);

      const double mass = std::log(ca.gdp) + std::log(cb.gdp);
      const double log_mu = opt.constant + opt.gdp_elasticity * mass + opt.distance_elasticity * std::log(dist) +
                            opt.contiguity * rec.contiguity + opt.common_language * rec.common_language +
                            opt.colony * rec.colony + opt.trade_agreement * rec.trade_agreement +
                            opt.landlocked * ((ca.landlocked ? 1.0 : 0.0) + (cb.landlocked ? 1.0 : 0.0));
      const double mu = std::exp(log_mu);
      const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
      w.mean(ia, ib) = w.mean(ib, ia) = mu;

      const double noise = std::exp(opt.noise_sigma * normal(rng) - 0.5 * opt.noise_sigma * opt.noise_sigma);
      const double split = 0.5 + unit(rng);
      const double eta_zero =
          opt.zero_intercept + opt.zero_distance * std::log(dist) - opt.zero_mass * (mass - centre);
      const bool zero = opt.structural_zeros && bernoulli(1.0 / (1.0 + std::exp(-eta_zero)));
      if (zero) continue;
      flows(ia, ib) = mu * noise * split;
      flows(ib, ia) = mu * noise * (2.0 - split);
    }
  }
  w.flows = DirectedFlowMatrix(std::move(flows), opt.year);
  w.truth = {{"log_gdp_i", opt.gdp_elasticity}, {"log_gdp_j", opt.gdp_elasticity},
             {"log_dist", opt.distance_elasticity}, {"ctg", opt.contiguity},
             {"coml", opt.common_language}, {"col", opt.colony},
             {"ta", opt.trade_agreement}, {"ll_i", opt.landlocked},
             {"ll_j", opt.landlocked}, {"comc", 0.0},
             {"comr", 0.0}, {"exc", 0.0}};
  return w;
}

}  // namespace itn::synthetic
