#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "itn/error.hpp"

namespace itn::stats {

struct RankedValue {
  std::size_t rank = 0;  // 1 = largest
  double value = 0.0;
};

/// Sorts the positive entries of `values` in decreasing order and assigns
/// ranks 1..m. Zeros are dropped; tied values keep their input order.
inline std::vector<RankedValue> rank_size(std::span<const double> values) {
  std::vector<double> positive;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("rank_size: values must be finite and nonnegative");
    if (v > 0.0) positive.push_back(v);
  }
  if (positive.empty()) throw InvalidArgument("rank_size: no positive values");
  std::stable_sort(positive.begin(), positive.end(), std::greater<>());
  std::vector<RankedValue> out;
  out.reserve(positive.size());
  for (std::size_t r = 0; r < positive.size(); ++r) out.push_back({r + 1, positive[r]});
  return out;
}

struct FitDomain {
  std::size_t top_k = 0;  // 0 = all points
  bool all() const noexcept { return top_k == 0; }
};

/// value = scale * rank^exponent, fitted by least squares in log-log space.
/// `scale` and `exponent` refer to the original values, not to the logs.
struct RankSizeFit {
  double exponent = 0.0;
  double scale = 0.0;
  double intercept = 0.0;  // log(scale)
  double r_squared = 0.0;
  std::size_t n_points = 0;
  FitDomain domain;
  bool degenerate = false;  // all values equal; R^2 undefined (NaN)
};

inline RankSizeFit fit_power_law(std::span<const RankedValue> series, FitDomain domain = {}) {
  const std::size_t m = domain.all() ? series.size() : std::min(domain.top_k, series.size());
  if (m < 3) throw InvalidArgument("fit_power_law needs at least three points");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (!(series[k].value > 0.0)) throw InvalidArgument("fit_power_law: values must be positive");
    mx += std::log(static_cast<double>(series[k].rank));
    my += std::log(series[k].value);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = std::log(static_cast<double>(series[k].rank)) - mx;
    const double dy = std::log(series[k].value) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RankSizeFit fit;
  fit.n_points = m;
  fit.domain = domain;
  if (sxx <= 0.0) throw InvalidArgument("fit_power_law: ranks do not vary");
  bool constant = true;
  for (std::size_t k = 1; k < m && constant; ++k) constant = series[k].value == series[0].value;
  if (constant || syy <= 0.0) {
    fit.degenerate = true;
    fit.exponent = 0.0;
    fit.intercept = std::log(series[0].value);
    fit.scale = series[0].value;
    fit.r_squared = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.scale = std::exp(fit.intercept);
  fit.r_squared = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

inline RankSizeFit fit_power_law(std::span<const double> values, FitDomain domain = {}) {
  const auto series = rank_size(values);
  return fit_power_law(std::span<const RankedValue>(series), domain);
}

/// Hill estimate of the tail index from the k largest values.
/// Offered next to the rank-size fit as a robustness figure only.
inline double hill_estimator(std::span<const double> values, std::size_t k) {
  std::vector<double> v;
  for (double x : values)
    if (x > 0.0) v.push_back(x);
  if (k < 2 || k >= v.size()) throw InvalidArgument("hill_estimator: need 2 <= k < number of positive values");
  std::sort(v.begin(), v.end(), std::greater<>());
  const double threshold = std::log(v[k]);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(v[i]) - threshold;
  return static_cast<double>(k) / sum;
}

struct LogNormalFit {
  double mu = 0.0;
  double sigma = 0.0;
  double ks_distance = 0.0;
  std::size_t n = 0;
};

/// Maximum-likelihood log-normal fit plus the Kolmogorov-Smirnov distance
/// between the sample and the fitted CDF.
inline LogNormalFit fit_log_normal(std::span<const double> values) {
  if (values.size() < 10) throw InvalidArgument("fit_log_normal needs at least ten values");
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("fit_log_normal: values must be positive");
    logs.push_back(std::log(v));
  }
  const double n = static_cast<double>(logs.size());
  const double mu = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
  double ss = 0.0;
  for (double l : logs) ss += (l - mu) * (l - mu);
  LogNormalFit fit;
  fit.n = logs.size();
  fit.mu = mu;
  fit.sigma = std::sqrt(ss / n);
  if (fit.sigma <= 0.0) throw InvalidArgument("fit_log_normal: values do not vary");

  std::sort(logs.begin(), logs.end());
  const boost::math::normal_distribution<double> fitted(mu, fit.sigma);
  double ks = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double cdf = boost::math::cdf(fitted, logs[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n;
    ks = std::max({ks, std::abs(cdf - below), std::abs(above - cdf)});
  }
  fit.ks_distance = ks;
  return fit;
}

}  // namespace itn::stats
