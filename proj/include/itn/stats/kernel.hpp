#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itn/error.hpp"

namespace itn::stats {

enum class KernelAxes { linear, log_log };

struct KernelOptions {
  std::optional<double> bandwidth;  // chosen by leave-one-out CV when empty
  KernelAxes axes = KernelAxes::linear;
  std::size_t grid_points = 30;
  std::size_t cv_max_points = 1000;  // LOO residuals are evaluated on at most this many points
  double confidence_z = 1.959963984540054;
};

struct ConditionalMeanCurve {
  std::vector<double> x;  // evaluation points, original units
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> effective_n;  // 1 / sum_i l_i(x)^2
  double bandwidth = 0.0;           // on the (possibly logged) x axis
  double sigma = 0.0;               // residual scale on the (possibly logged) y axis
  bool bandwidth_from_cv = false;
  KernelAxes axes = KernelAxes::linear;
  std::string method = "local-linear, Gaussian kernel; bandwidth by least-squares leave-one-out CV";
};

namespace detail {

/// Local-linear smoother over data sorted by x. Kernel weights are truncated
/// beyond `cutoff` bandwidths, where the Gaussian falls below 1e-14.
class LocalLinear {
public:
  LocalLinear(std::vector<double> x, std::vector<double> y, double h) : x_(std::move(x)), y_(std::move(y)), h_(h) {}

  struct Sums {
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  };

  Sums sums(double x0) const {
    const double lo = x0 - cutoff * h_, hi = x0 + cutoff * h_;
    auto first = std::lower_bound(x_.begin(), x_.end(), lo);
    auto last = std::upper_bound(first, x_.end(), hi);
    Sums s;
    for (auto it = first; it != last; ++it) {
      const auto i = static_cast<std::size_t>(it - x_.begin());
      const double d = x_[i] - x0;
      const double u = d / h_;
      const double k = std::exp(-0.5 * u * u);
      s.s0 += k;
      s.s1 += k * d;
      s.s2 += k * d * d;
      s.t0 += k * y_[i];
      s.t1 += k * d * y_[i];
    }
    return s;
  }

  static std::optional<double> solve(const Sums& s) {
    if (s.s0 <= 1e-300) return std::nullopt;
    const double det = s.s0 * s.s2 - s.s1 * s.s1;
    if (det <= 1e-12 * s.s0 * s.s2) return s.t0 / s.s0;  // locally flat design: fall back to a local mean
    return (s.s2 * s.t0 - s.s1 * s.t1) / det;
  }

  /// Equivalent-kernel weights l_i(x0); fills `w` over the full sample.
  void weights(double x0, std::vector<double>& w) const {
    w.assign(x_.size(), 0.0);
    const Sums s = sums(x0);
    const double det = s.s0 * s.s2 - s.s1 * s.s1;
    const bool flat = det <= 1e-12 * s.s0 * s.s2;
    const double lo = x0 - cutoff * h_, hi = x0 + cutoff * h_;
    auto first = std::lower_bound(x_.begin(), x_.end(), lo);
    auto last = std::upper_bound(first, x_.end(), hi);
    for (auto it = first; it != last; ++it) {
      const auto i = static_cast<std::size_t>(it - x_.begin());
      const double d = x_[i] - x0;
      const double u = d / h_;
      const double k = std::exp(-0.5 * u * u);
      w[i] = flat ? k / s.s0 : k * (s.s2 - d * s.s1) / det;
    }
  }

  double loo_residual(std::size_t i) const {
    Sums s = sums(x_[i]);
    s.s0 -= 1.0;
    s.t0 -= y_[i];
    const auto fit = solve(s);
    if (!fit) return std::numeric_limits<double>::infinity();
    return y_[i] - *fit;
  }

  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& y() const noexcept { return y_; }

  static constexpr double cutoff = 8.0;

private:
  std::vector<double> x_, y_;
  double h_;
};

}  // namespace detail

/// Least-squares leave-one-out CV over a geometric grid spanning 1% to 100%
/// of the x range.
inline double cv_bandwidth(std::span<const double> x, std::span<const double> y, const KernelOptions& opt = {}) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> xs, ys;
  for (auto k : order) {
    xs.push_back(x[k]);
    ys.push_back(y[k]);
  }
  const double range = xs.back() - xs.front();
  if (!(range > 0.0)) throw InvalidArgument("kernel_conditional_mean: x does not vary");

  std::vector<std::size_t> probe;
  const std::size_t n = xs.size();
  const std::size_t m = std::min(n, std::max<std::size_t>(opt.cv_max_points, 1));
  for (std::size_t k = 0; k < m; ++k) probe.push_back(k * n / m);

  const std::size_t g = std::max<std::size_t>(opt.grid_points, 2);
  const double lo = 0.01 * range, hi = range;
  double best_h = hi, best_score = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g; ++k) {
    const double h = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(g - 1));
    const detail::LocalLinear smoother(xs, ys, h);
    double score = 0.0;
    for (auto i : probe) {
      const double r = smoother.loo_residual(i);
      score += r * r;
    }
    if (score < best_score) {
      best_score = score;
      best_h = h;
    }
  }
  return best_h;
}

/// Local-linear estimate of E[y | x] at `eval_points` with pointwise 95% bounds
/// m(x) +/- z sigma sqrt(sum_i l_i(x)^2), where sigma^2 is the residual variance
/// corrected by the smoother's degrees of freedom (n - 2 tr L + tr L'L).
/// With log-log axes the smoothing happens on logs and the curve is mapped back.
inline ConditionalMeanCurve kernel_conditional_mean(std::span<const double> x, std::span<const double> y,
                                                    std::span<const double> eval_points,
                                                    const KernelOptions& opt = {}) {
  if (x.size() != y.size()) throw InvalidArgument("kernel_conditional_mean: length mismatch");
  if (x.size() < 20) throw InvalidArgument("kernel_conditional_mean needs at least 20 observations");
  if (opt.bandwidth && !(*opt.bandwidth > 0.0)) throw InvalidArgument("kernel_conditional_mean: bandwidth must be positive");

  const bool logs = opt.axes == KernelAxes::log_log;
  auto forward = [&](double v) {
    if (!logs) return v;
    if (!(v > 0.0)) throw InvalidArgument("kernel_conditional_mean: log axes need positive data");
    return std::log(v);
  };

  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> xs, ys;
  for (auto k : order) {
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) throw InvalidArgument("kernel_conditional_mean: non-finite data");
    xs.push_back(forward(x[k]));
    ys.push_back(forward(y[k]));
  }

  ConditionalMeanCurve curve;
  curve.axes = opt.axes;
  if (opt.bandwidth) {
    curve.bandwidth = *opt.bandwidth;
  } else {
    curve.bandwidth = cv_bandwidth(xs, ys, opt);
    curve.bandwidth_from_cv = true;
  }
  const detail::LocalLinear smoother(xs, ys, curve.bandwidth);

  // Residual variance with the smoother's effective degrees of freedom.
  const std::size_t n = xs.size();
  double rss = 0.0, trace_l = 0.0, trace_ltl = 0.0;
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) {
    smoother.weights(xs[i], w);
    double fit = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      fit += w[j] * ys[j];
      trace_ltl += w[j] * w[j];
    }
    trace_l += w[i];
    rss += (ys[i] - fit) * (ys[i] - fit);
  }
  const double dof = static_cast<double>(n) - 2.0 * trace_l + trace_ltl;
  curve.sigma = dof > 0.0 ? std::sqrt(rss / dof) : 0.0;

  for (double e : eval_points) {
    const double x0 = forward(e);
    smoother.weights(x0, w);
    double fit = 0.0, norm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      fit += w[j] * ys[j];
      norm2 += w[j] * w[j];
    }
    const double half = opt.confidence_z * curve.sigma * std::sqrt(norm2);
    auto back = [&](double v) { return logs ? std::exp(v) : v; };
    curve.x.push_back(e);
    curve.mean.push_back(back(fit));
    curve.lower.push_back(back(fit - half));
    curve.upper.push_back(back(fit + half));
    curve.effective_n.push_back(norm2 > 0.0 ? 1.0 / norm2 : 0.0);
  }
  return curve;
}

/// `count` evaluation points evenly spaced between the min and max of x
/// (geometrically spaced for log axes).
inline std::vector<double> evaluation_grid(std::span<const double> x, std::size_t count, KernelAxes axes) {
  if (x.empty() || count < 2) throw InvalidArgument("evaluation_grid: empty input");
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  std::vector<double> grid;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    if (axes == KernelAxes::log_log)
      grid.push_back(std::exp(std::log(*mn) + t * (std::log(*mx) - std::log(*mn))));
    else
      grid.push_back(*mn + t * (*mx - *mn));
  }
  return grid;
}

}  // namespace itn::stats
