#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "itn/error.hpp"
#include "itn/network.hpp"

// Iteratively reweighted least squares for the two canonical-link GLMs the
// gravity estimators need (Poisson/log and Bernoulli/logit), plus OLS.

namespace itn::gravity {

enum class Family { poisson, logit };

/// Heteroscedasticity-robust covariance flavour. HC3 divides each squared
/// residual by (1 - h_i)^2, h_i the leverage of row i in the weighted design;
/// HC1 applies n / (n - k) to the plain sandwich.
enum class Sandwich { hc1, hc3 };

struct IrlsOptions {
  int max_iterations = 100;
  double rel_loglik_tol = 1e-10;
  double step_tol = 1e-8;
  double score_tol = 1e-10;  // max |X'(y - mu)| / sum|y|
  bool check_rank = true;
  Sandwich sandwich = Sandwich::hc3;
  std::optional<std::size_t> intercept;  // column holding the constant, if any
  double max_step = 10.0;                // Newton steps longer than this (max-norm) are shortened
  double separation_eta = 30.0;          // |x'b| beyond this on a fitted row signals separation
};

/// Result over the rows of one estimation sample. Omitted columns carry a
/// zero coefficient and zero covariance rows/columns.
struct GlmFit {
  Vector beta;
  std::vector<bool> omitted;
  std::vector<std::string> omitted_reasons;  // "<name>: <why>"
  Matrix covariance;  // robust sandwich (Poisson) or inverse information (logit)
  Vector eta;
  Vector mean;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool ridge_used = false;
  double max_score = 0.0;  // max_k |sum_i w_i (y_i - mu_i) x_ik| / sum_i |w_i y_i|
  std::vector<double> trace;

  std::size_t estimated_parameters() const {
    return static_cast<std::size_t>(std::count(omitted.begin(), omitted.end(), false));
  }
};

namespace detail {

inline double safe_exp(double v) { return std::exp(std::min(v, 700.0)); }

inline double log1p_exp(double v) { return v > 35.0 ? v : std::log1p(std::exp(v)); }

inline double logistic(double v) {
  return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

inline double pointwise_loglik(Family f, double y, double eta) {
  if (f == Family::poisson) {
    const double mu = safe_exp(eta);
    return (y > 0.0 ? y * eta : 0.0) - mu - std::lgamma(y + 1.0);
  }
  return y * eta - log1p_exp(eta);
}

inline double mean_of(Family f, double eta) { return f == Family::poisson ? safe_exp(eta) : logistic(eta); }

inline double variance_of(Family f, double mu) { return f == Family::poisson ? mu : mu * (1.0 - mu); }

/// Columns to omit before fitting: all-zero columns, and non-intercept
/// columns constant over the sample when an intercept is present.
inline std::vector<bool> degenerate_columns(const Matrix& x, const std::vector<std::string>& names,
                                            const std::optional<std::size_t>& intercept,
                                            std::vector<std::string>& reasons) {
  std::vector<bool> out(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (x.rows() == 0) continue;
    const double lo = x.col(k).minCoeff(), hi = x.col(k).maxCoeff();
    if (lo == 0.0 && hi == 0.0) {
      out[uk] = true;
      reasons.push_back(names[uk] + ": identically zero in the estimation sample");
    } else if (intercept && *intercept != uk && lo == hi) {
      out[uk] = true;
      reasons.push_back(names[uk] + ": constant in the estimation sample");
    }
  }
  return out;
}

/// Throws RankDeficientError naming the columns a pivoted QR finds dependent.
inline void check_full_rank(const Matrix& x, const std::vector<std::string>& names) {
  if (x.cols() == 0) return;
  Matrix scaled = x;
  for (Eigen::Index k = 0; k < scaled.cols(); ++k) {
    const double norm = scaled.col(k).norm();
    if (norm > 0.0) scaled.col(k) /= norm;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(scaled);
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  if (rank == scaled.cols()) return;
  std::vector<std::string> dependent;
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = rank; k < scaled.cols(); ++k) dependent.push_back(names[static_cast<std::size_t>(perm(k))]);
  std::sort(dependent.begin(), dependent.end());
  throw RankDeficientError(std::move(dependent));
}

/// Solves H d = g for symmetric positive (semi)definite H with Jacobi scaling.
/// Adds a 1e-10 ridge when the Cholesky factorisation fails.
inline Vector solve_normal(const Matrix& h, const Vector& g, bool& ridge_used, Matrix* inverse = nullptr) {
  const auto p = h.rows();
  Vector scale(p);
  for (Eigen::Index k = 0; k < p; ++k) scale(k) = h(k, k) > 0.0 ? 1.0 / std::sqrt(h(k, k)) : 1.0;
  Matrix hs = scale.asDiagonal() * h * scale.asDiagonal();
  Eigen::LLT<Matrix> llt(hs);
  if (llt.info() != Eigen::Success) {
    ridge_used = true;
    hs.diagonal().array() += 1e-10;
    llt.compute(hs);
    if (llt.info() != Eigen::Success) throw Error("normal equations are numerically singular");
  }
  if (inverse) {
    *inverse = scale.asDiagonal() * llt.solve(Matrix::Identity(p, p)) * scale.asDiagonal();
  }
  return scale.asDiagonal() * llt.solve(scale.asDiagonal() * g);
}

/// bread * sum_i s_i^2 x_i x_i' * bread with s_i the score residual, scaled
/// per `kind`. `v` holds the IRLS weights, so h_i = v_i x_i' bread x_i.
inline Matrix sandwich(const Matrix& x, const Vector& score_resid, const Vector& v, const Matrix& bread, Sandwich kind) {
  const auto n = x.rows(), p = x.cols();
  Vector s = score_resid;
  if (kind == Sandwich::hc3) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double h = v(r) * x.row(r).dot(bread * x.row(r).transpose());
      s(r) /= std::max(1.0 - h, 1e-8);
    }
  }
  const Matrix xr = x.array().colwise() * s.array();
  Matrix meat = Matrix::Zero(p, p);
  meat.selfadjointView<Eigen::Lower>().rankUpdate(xr.transpose());
  meat = meat.selfadjointView<Eigen::Lower>();
  Matrix cov = bread * meat * bread;
  if (kind == Sandwich::hc1 && n > p) cov *= static_cast<double>(n) / static_cast<double>(n - p);
  return cov;
}

}  // namespace detail

/// Maximises the (pseudo) log-likelihood of a canonical-link GLM by Newton /
/// IRLS with a capped step and step halving. Convergence: max |step| < step_tol, or relative
/// log-likelihood change < rel_loglik_tol while the scaled score is below
/// score_tol.
inline GlmFit fit_glm(Family family, const Matrix& x_full, const Vector& y, const std::vector<std::string>& names,
                      const IrlsOptions& opt = {}, const Vector* prior_weights = nullptr,
                      const Vector* start = nullptr) {
  const auto n = x_full.rows();
  const auto p_full = x_full.cols();
  if (y.size() != n) throw InvalidArgument("fit_glm: response length does not match the design");
  if (static_cast<Eigen::Index>(names.size()) != p_full) throw InvalidArgument("fit_glm: column names do not match");
  if (prior_weights && prior_weights->size() != n) throw InvalidArgument("fit_glm: weight length does not match");
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!std::isfinite(y(r)) || y(r) < 0.0) throw InvalidArgument("fit_glm: response must be finite and nonnegative");
    if (family == Family::logit && y(r) != 0.0 && y(r) != 1.0) throw InvalidArgument("fit_glm: logit response must be 0/1");
  }

  GlmFit fit;
  fit.omitted = detail::degenerate_columns(x_full, names, opt.intercept, fit.omitted_reasons);
  std::vector<Eigen::Index> active;
  std::vector<std::string> active_names;
  for (Eigen::Index k = 0; k < p_full; ++k) {
    if (fit.omitted[static_cast<std::size_t>(k)]) continue;
    active.push_back(k);
    active_names.push_back(names[static_cast<std::size_t>(k)]);
  }
  const auto p = static_cast<Eigen::Index>(active.size());
  Matrix x(n, p);
  for (Eigen::Index c = 0; c < p; ++c) x.col(c) = x_full.col(active[static_cast<std::size_t>(c)]);
  if (n <= p) throw InvalidArgument("fit_glm: fewer observations than parameters");
  if (opt.check_rank) detail::check_full_rank(x, active_names);

  const Vector w = prior_weights ? *prior_weights : Vector::Ones(n);
  const double y_scale = std::max((w.array() * y.array()).abs().sum(), 1e-300);

  Vector beta = Vector::Zero(p);
  if (start && start->size() == p_full) {
    for (Eigen::Index c = 0; c < p; ++c) beta(c) = (*start)(active[static_cast<std::size_t>(c)]);
  } else if (opt.intercept && !fit.omitted[*opt.intercept]) {
    const double ybar = std::clamp((w.array() * y.array()).sum() / w.sum(), 1e-12, 1e300);
    const auto pos = std::find(active.begin(), active.end(), static_cast<Eigen::Index>(*opt.intercept)) - active.begin();
    beta(pos) = family == Family::poisson ? std::log(ybar) : std::log(std::clamp(ybar, 1e-6, 1 - 1e-6) /
                                                                      (1.0 - std::clamp(ybar, 1e-6, 1 - 1e-6)));
  }

  auto loglik_at = [&](const Vector& eta) {
    double ll = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) ll += w(r) * detail::pointwise_loglik(family, y(r), eta(r));
    return ll;
  };

  Vector eta = x * beta;
  double ll = loglik_at(eta);
  fit.trace.push_back(ll);
  Vector mu(n), v(n), resid(n);
  Matrix h(p, p);
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iterations && !converged; ++it) {
    for (Eigen::Index r = 0; r < n; ++r) {
      mu(r) = detail::mean_of(family, eta(r));
      v(r) = w(r) * detail::variance_of(family, mu(r));
      resid(r) = w(r) * (y(r) - mu(r));
    }
    const Vector score = x.transpose() * resid;
    const Matrix xs = x.array().colwise() * v.array().sqrt();
    h.setZero();
    h.selfadjointView<Eigen::Lower>().rankUpdate(xs.transpose());
    h = h.selfadjointView<Eigen::Lower>();
    Vector step = detail::solve_normal(h, score, fit.ridge_used);
    const double longest = step.cwiseAbs().maxCoeff();
    if (!std::isfinite(longest)) throw ConvergenceError("fit_glm: Newton step is not finite", fit.trace);
    if (longest > opt.max_step) step *= opt.max_step / longest;

    double t = 1.0;
    Vector beta_new, eta_new;
    double ll_new = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int halving = 0; halving < 40 && !accepted; ++halving) {
      beta_new = beta + t * step;
      eta_new = x * beta_new;
      ll_new = loglik_at(eta_new);
      accepted = std::isfinite(ll_new) && ll_new >= ll - 1e-12 * std::abs(ll);
      if (!accepted) t *= 0.5;
    }
    if (!accepted) {
      if (!std::isfinite(ll)) throw ConvergenceError("fit_glm: log-likelihood is not finite", fit.trace);
      // no ascent along the Newton direction: the current point is as good as it gets
      const double scaled_score = score.cwiseAbs().maxCoeff() / y_scale;
      converged = scaled_score < std::sqrt(opt.score_tol);
      if (!converged) throw ConvergenceError("fit_glm: line search failed to increase the log-likelihood", fit.trace);
      ++it;
      break;
    }

    const double max_step = (t * step).cwiseAbs().maxCoeff();
    const double rel_change = std::abs(ll_new - ll) / (std::abs(ll) + 1.0);
    beta = beta_new;
    eta = eta_new;
    ll = ll_new;
    fit.trace.push_back(ll);

    for (Eigen::Index r = 0; r < n; ++r) resid(r) = w(r) * (y(r) - detail::mean_of(family, eta(r)));
    const double scaled_score = (x.transpose() * resid).cwiseAbs().maxCoeff() / y_scale;
    converged = max_step < opt.step_tol || (rel_change < opt.rel_loglik_tol && scaled_score < opt.score_tol);
  }
  fit.iterations = it;
  fit.converged = converged;

  const double max_eta = eta.size() ? eta.cwiseAbs().maxCoeff() : 0.0;
  if (family == Family::logit && max_eta > opt.separation_eta)
    throw SeparationError("logit fit diverges (|x'b| = " + std::to_string(max_eta) +
                          "): a regressor combination separates zero and positive flows; prune regressors");
  if (!converged)
    throw ConvergenceError("fit_glm: no convergence after " + std::to_string(opt.max_iterations) + " iterations",
                           fit.trace);

  for (Eigen::Index r = 0; r < n; ++r) {
    mu(r) = detail::mean_of(family, eta(r));
    v(r) = w(r) * detail::variance_of(family, mu(r));
    resid(r) = w(r) * (y(r) - mu(r));
  }
  fit.max_score = (x.transpose() * resid).cwiseAbs().maxCoeff() / y_scale;
  const Matrix xs = x.array().colwise() * v.array().sqrt();
  h.setZero();
  h.selfadjointView<Eigen::Lower>().rankUpdate(xs.transpose());
  h = h.selfadjointView<Eigen::Lower>();
  Matrix bread;
  detail::solve_normal(h, Vector::Zero(p), fit.ridge_used, &bread);

  Matrix cov;
  if (family == Family::poisson) {
    cov = detail::sandwich(x, resid, v, bread, opt.sandwich);
  } else {
    cov = bread;
  }
  cov = 0.5 * (cov + cov.transpose());

  fit.beta = Vector::Zero(p_full);
  fit.covariance = Matrix::Zero(p_full, p_full);
  for (Eigen::Index a = 0; a < p; ++a) {
    fit.beta(active[static_cast<std::size_t>(a)]) = beta(a);
    for (Eigen::Index b = 0; b < p; ++b)
      fit.covariance(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(b)]) = cov(a, b);
  }
  fit.eta = eta;
  fit.mean = mu;
  fit.loglik = ll;
  return fit;
}

/// Ordinary least squares with robust sandwich covariance and Gaussian log-likelihood.
inline GlmFit fit_ols(const Matrix& x_full, const Vector& y, const std::vector<std::string>& names,
                      const IrlsOptions& opt = {}) {
  const auto n = x_full.rows();
  GlmFit fit;
  fit.omitted = detail::degenerate_columns(x_full, names, opt.intercept, fit.omitted_reasons);
  std::vector<Eigen::Index> active;
  std::vector<std::string> active_names;
  for (Eigen::Index k = 0; k < x_full.cols(); ++k) {
    if (fit.omitted[static_cast<std::size_t>(k)]) continue;
    active.push_back(k);
    active_names.push_back(names[static_cast<std::size_t>(k)]);
  }
  const auto p = static_cast<Eigen::Index>(active.size());
  if (n <= p) throw InvalidArgument("fit_ols: fewer observations than parameters");
  Matrix x(n, p);
  for (Eigen::Index c = 0; c < p; ++c) x.col(c) = x_full.col(active[static_cast<std::size_t>(c)]);
  if (opt.check_rank) detail::check_full_rank(x, active_names);

  Matrix h = x.transpose() * x;
  Matrix bread;
  const Vector beta = detail::solve_normal(h, x.transpose() * y, fit.ridge_used, &bread);
  const Vector eta = x * beta;
  const Vector resid = y - eta;
  Matrix cov = detail::sandwich(x, resid, Vector::Ones(n), bread, opt.sandwich);
  cov = 0.5 * (cov + cov.transpose());

  const double rss = resid.squaredNorm();
  const double sigma2 = rss / static_cast<double>(n);
  fit.loglik = -0.5 * static_cast<double>(n) * (std::log(2.0 * M_PI * sigma2) + 1.0);
  fit.beta = Vector::Zero(x_full.cols());
  fit.covariance = Matrix::Zero(x_full.cols(), x_full.cols());
  for (Eigen::Index a = 0; a < p; ++a) {
    fit.beta(active[static_cast<std::size_t>(a)]) = beta(a);
    for (Eigen::Index b = 0; b < p; ++b)
      fit.covariance(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(b)]) = cov(a, b);
  }
  fit.eta = eta;
  fit.mean = eta;
  fit.iterations = 1;
  fit.converged = true;
  fit.trace.push_back(fit.loglik);
  return fit;
}

}  // namespace itn::gravity
