#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "itn/error.hpp"
#include "itn/gravity/design.hpp"
#include "itn/gravity/glm.hpp"

namespace itn::gravity {

enum class Estimator { zippml, ppml, ols_log };

inline std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::zippml: return "zippml";
    case Estimator::ppml: return "ppml";
    case Estimator::ols_log: return "ols_log";
  }
  return "?";
}

inline constexpr const char* adjusted_r2_definition =
    "1 - (1 - r^2) (n - 1) / (n - k - 1), r = Pearson correlation of observed and fitted flows over the "
    "estimation sample, k = estimated parameters excluding the constant";

/// Logit model of P(no trade) for every dyad of the design.
struct ZeroStage {
  std::vector<DesignColumn> columns;
  Vector coefficients;
  Matrix covariance;
  std::vector<bool> omitted;
  Vector p_zero;  // per design row
  std::vector<std::size_t> perfectly_predicted;  // design rows whose class a dropped column determines
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> notes;
};

struct Diagnostics {
  double loglik = 0.0;
  double poisson_loglik = 0.0;  // Poisson stage alone, on its own sample
  double adj_r2 = std::numeric_limits<double>::quiet_NaN();
  std::string adj_r2_definition = adjusted_r2_definition;
  double wald_chi2 = std::numeric_limits<double>::quiet_NaN();
  std::size_t wald_df = 0;
  double wald_p = std::numeric_limits<double>::quiet_NaN();
  double vuong_z = std::numeric_limits<double>::quiet_NaN();
  double vuong_p = std::numeric_limits<double>::quiet_NaN();
  double dispersion = std::numeric_limits<double>::quiet_NaN();  // Pearson chi2 / (n - k)
  std::size_t n_obs = 0;
  std::size_t n_params = 0;
  int iterations = 0;
  bool converged = false;
  bool ridge_used = false;
  double max_score = 0.0;
  std::vector<std::string> notes;
};

/// Estimated gravity equation over the dyads of a CovariateSet.
struct GravityFit {
  Estimator estimator = Estimator::ppml;
  std::size_t n_countries = 0;
  std::vector<Dyad> dyads;
  Vector response;
  std::vector<DesignColumn> columns;
  Vector coefficients;
  std::vector<bool> omitted;
  Matrix robust_covariance;
  Vector fitted;     // mu-hat for every design row (predicted outside the sample)
  Vector residuals;  // w / mu-hat, 0 where w = 0
  std::vector<bool> in_sample;
  std::optional<ZeroStage> zero_stage;
  Vector pointwise_loglik;  // per design row, under the fitted model
  Diagnostics diagnostics;

  double standard_error(std::size_t k) const {
    return std::sqrt(std::max(0.0, robust_covariance(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))));
  }

  double p_value(std::size_t k) const {
    const double se = standard_error(k);
    if (!(se > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double z = coefficients(static_cast<Eigen::Index>(k)) / se;
    return 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), std::abs(z)));
  }

  std::optional<std::size_t> find_column(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (columns[k].name == name) return k;
    return std::nullopt;
  }
};

struct FitOptions {
  IrlsOptions irls;
  bool logit_fixed_effects = true;
  const Vector* prior_weights = nullptr;  // per design row, Poisson stages only
  const Vector* start = nullptr;          // Poisson-stage starting coefficients
  const Vector* zero_start = nullptr;     // zero-stage starting coefficients
  bool vuong = true;
};

namespace detail {

inline std::vector<std::string> names_of(const std::vector<DesignColumn>& cols) {
  std::vector<std::string> out;
  for (const auto& c : cols) out.push_back(c.name);
  return out;
}

inline std::optional<std::size_t> intercept_of(const std::vector<DesignColumn>& cols) {
  for (std::size_t k = 0; k < cols.size(); ++k)
    if (cols[k].role == ColumnRole::constant) return k;
  return std::nullopt;
}

inline Matrix rows_of(const Matrix& x, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

inline Vector rows_of(const Vector& v, const std::vector<std::size_t>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Eigen::Index>(r)) = v(static_cast<Eigen::Index>(rows[r]));
  return out;
}

inline double poisson_loglik(double y, double mu) {
  return (y > 0.0 ? y * std::log(mu) : 0.0) - mu - std::lgamma(y + 1.0);
}

inline double chi2_sf(double stat, double df) {
  if (df <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (stat <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(df), stat));
}

inline double normal_two_sided(double z) {
  return 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), std::abs(z)));
}

}  // namespace detail

/// Joint Wald test that every non-fixed-effect slope is zero, using the
/// robust covariance. Returns (chi2, df, p).
inline std::tuple<double, std::size_t, double> wald_test(const std::vector<DesignColumn>& columns, const Vector& beta,
                                                         const Matrix& cov, const std::vector<bool>& omitted) {
  std::vector<Eigen::Index> slopes;
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k].role == ColumnRole::regressor && !omitted[k]) slopes.push_back(static_cast<Eigen::Index>(k));
  if (slopes.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0, std::numeric_limits<double>::quiet_NaN()};
  const auto m = static_cast<Eigen::Index>(slopes.size());
  Vector b(m);
  Matrix v(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    b(a) = beta(slopes[static_cast<std::size_t>(a)]);
    for (Eigen::Index c = 0; c < m; ++c) v(a, c) = cov(slopes[static_cast<std::size_t>(a)], slopes[static_cast<std::size_t>(c)]);
  }
  const double chi2 = b.dot(v.ldlt().solve(b));
  return {chi2, slopes.size(), detail::chi2_sf(chi2, static_cast<double>(m))};
}

/// Squared correlation of observed and fitted responses, adjusted for k
/// estimated non-constant parameters.
inline double adjusted_pseudo_r2(const Vector& observed, const Vector& fitted, std::size_t k) {
  const auto n = static_cast<std::size_t>(observed.size());
  if (fitted.size() != observed.size()) throw InvalidArgument("adjusted_pseudo_r2: length mismatch");
  if (n <= k + 1) throw InvalidArgument("adjusted_pseudo_r2: need more observations than parameters + 1");
  const double mo = observed.mean(), mf = fitted.mean();
  const double sxy = ((observed.array() - mo) * (fitted.array() - mf)).sum();
  const double sxx = (observed.array() - mo).square().sum();
  const double syy = (fitted.array() - mf).square().sum();
  const double r2 = (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 0.0;
  return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - k - 1);
}

inline double adjusted_pseudo_r2(const GravityFit& fit) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fit.in_sample.size(); ++r)
    if (fit.in_sample[r]) rows.push_back(r);
  std::size_t k = 0;
  for (std::size_t c = 0; c < fit.columns.size(); ++c)
    if (!fit.omitted[c] && fit.columns[c].role != ColumnRole::constant) ++k;
  return adjusted_pseudo_r2(detail::rows_of(fit.response, rows), detail::rows_of(fit.fitted, rows), k);
}

struct VuongResult {
  double z = 0.0;
  double p_value = 1.0;
};

/// Vuong statistic Z = sqrt(n) mean(lA - lB) / sd(lA - lB); positive favours A.
inline VuongResult vuong_test(const Vector& loglik_a, const Vector& loglik_b) {
  if (loglik_a.size() != loglik_b.size() || loglik_a.size() < 2)
    throw InvalidArgument("vuong_test: log-likelihood vectors must have the same length >= 2");
  const Vector d = loglik_a - loglik_b;
  const double n = static_cast<double>(d.size());
  const double mean = d.mean();
  const double var = (d.array() - mean).square().sum() / n;
  const double sd = std::sqrt(var);
  if (!(sd > 1e-12 * (1.0 + std::abs(mean))))
    throw InvalidArgument("vuong_test: models indistinguishable (zero variance of log-likelihood differences)");
  VuongResult out;
  out.z = std::sqrt(n) * mean / sd;
  out.p_value = detail::normal_two_sided(out.z);
  return out;
}

namespace detail {

inline GravityFit skeleton(const CovariateSet& design, Estimator e) {
  GravityFit fit;
  fit.estimator = e;
  fit.n_countries = design.n_countries;
  fit.dyads = design.dyads;
  fit.response = design.response;
  fit.columns = design.columns;
  return fit;
}

inline void finish_poisson(GravityFit& fit, const CovariateSet& design, const GlmFit& glm,
                           const std::vector<std::size_t>& sample) {
  fit.coefficients = glm.beta;
  fit.omitted = glm.omitted;
  fit.robust_covariance = glm.covariance;
  fit.fitted = (design.x * glm.beta).unaryExpr([](double v) { return std::exp(std::min(v, 700.0)); });
  fit.in_sample.assign(design.rows(), false);
  for (auto r : sample) fit.in_sample[r] = true;
  fit.residuals = Vector::Zero(static_cast<Eigen::Index>(design.rows()));
  for (Eigen::Index r = 0; r < fit.residuals.size(); ++r)
    if (design.response(r) > 0.0) fit.residuals(r) = design.response(r) / fit.fitted(r);

  auto& d = fit.diagnostics;
  d.poisson_loglik = glm.loglik;
  d.iterations = glm.iterations;
  d.converged = glm.converged;
  d.ridge_used = glm.ridge_used;
  d.max_score = glm.max_score;
  d.n_obs = sample.size();
  d.n_params = glm.estimated_parameters();
  for (const auto& reason : glm.omitted_reasons) d.notes.push_back("omitted " + reason);
  double pearson = 0.0;
  for (auto r : sample) {
    const double mu = fit.fitted(static_cast<Eigen::Index>(r));
    const double y = design.response(static_cast<Eigen::Index>(r));
    pearson += (y - mu) * (y - mu) / mu;
  }
  if (sample.size() > d.n_params) d.dispersion = pearson / static_cast<double>(sample.size() - d.n_params);
  std::tie(d.wald_chi2, d.wald_df, d.wald_p) = wald_test(fit.columns, fit.coefficients, fit.robust_covariance, fit.omitted);
  std::size_t k = 0;
  for (std::size_t c = 0; c < fit.columns.size(); ++c)
    if (!fit.omitted[c] && fit.columns[c].role != ColumnRole::constant) ++k;
  if (sample.size() > k + 1)
    d.adj_r2 = adjusted_pseudo_r2(rows_of(design.response, sample), rows_of(fit.fitted, sample), k);
}

inline std::vector<std::size_t> all_rows(const CovariateSet& design) {
  std::vector<std::size_t> rows(design.rows());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  return rows;
}

inline GlmFit poisson_stage(const CovariateSet& design, const std::vector<std::size_t>& sample, const FitOptions& opt,
                            const Vector* start = nullptr) {
  IrlsOptions irls = opt.irls;
  irls.intercept = intercept_of(design.columns);
  const Matrix x = rows_of(design.x, sample);
  const Vector y = rows_of(design.response, sample);
  std::optional<Vector> w;
  if (opt.prior_weights) w = rows_of(*opt.prior_weights, sample);
  return fit_glm(Family::poisson, x, y, names_of(design.columns), irls, w ? &*w : nullptr, start);
}

}  // namespace detail

/// Poisson pseudo-maximum likelihood on every dyad of the design.
inline GravityFit fit_ppml(const CovariateSet& design, const FitOptions& opt = {}) {
  if (opt.prior_weights && opt.prior_weights->size() != static_cast<Eigen::Index>(design.rows()))
    throw InvalidArgument("fit_ppml: weight vector does not match the design");
  GravityFit fit = detail::skeleton(design, Estimator::ppml);
  const auto sample = detail::all_rows(design);
  const GlmFit glm = detail::poisson_stage(design, sample, opt, opt.start);
  detail::finish_poisson(fit, design, glm, sample);
  fit.pointwise_loglik.resize(static_cast<Eigen::Index>(design.rows()));
  for (Eigen::Index r = 0; r < fit.pointwise_loglik.size(); ++r)
    fit.pointwise_loglik(r) = detail::poisson_loglik(design.response(r), fit.fitted(r));
  fit.diagnostics.loglik = glm.loglik;
  return fit;
}

/// Logit of the zero-flow indicator on the design's regressors.
///
/// Columns whose nonzero rows all share one outcome (a contiguity dummy when
/// every contiguous pair trades, or a country trading with everyone) would
/// send their coefficient to infinity; such columns are dropped and their
/// rows fixed at the observed class, repeatedly until none remain.
inline ZeroStage fit_logit_zero_stage(const CovariateSet& design, const FitOptions& opt = {},
                                      const Vector* start = nullptr) {
  const auto rows = static_cast<Eigen::Index>(design.rows());
  Vector zero(rows);
  std::size_t zeros = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    zero(r) = design.response(r) == 0.0 ? 1.0 : 0.0;
    zeros += static_cast<std::size_t>(zero(r));
  }
  if (zeros == 0 || zeros == design.rows())
    throw InvalidArgument("fit_logit_zero_stage: the zero indicator has a single class");

  ZeroStage stage;
  stage.columns = design.columns;
  std::vector<bool> dropped(design.columns.size(), false);
  if (!opt.logit_fixed_effects) {
    for (std::size_t k = 0; k < design.columns.size(); ++k)
      if (design.columns[k].role == ColumnRole::fixed_effect) dropped[k] = true;
    stage.notes.push_back("fixed effects excluded from the zero stage");
  }

  std::vector<bool> fixed_row(design.rows(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < design.columns.size(); ++k) {
      if (dropped[k] || design.columns[k].role == ColumnRole::constant) continue;
      const auto col = design.x.col(static_cast<Eigen::Index>(k));
      bool nonneg = true;
      int seen = -1;
      bool mixed = false, any = false;
      for (Eigen::Index r = 0; r < rows && nonneg; ++r) {
        if (col(r) < 0.0) nonneg = false;
        if (fixed_row[static_cast<std::size_t>(r)] || col(r) == 0.0) continue;
        any = true;
        const int cls = static_cast<int>(zero(r));
        if (seen < 0) seen = cls;
        else if (seen != cls) mixed = true;
      }
      if (!nonneg || mixed || !any) continue;
      dropped[k] = true;
      changed = true;
      for (Eigen::Index r = 0; r < rows; ++r)
        if (col(r) != 0.0) fixed_row[static_cast<std::size_t>(r)] = true;
      stage.notes.push_back(design.columns[k].name + " perfectly predicts " + (seen == 1 ? "zero" : "positive") +
                            " flows; dropped from the zero stage with its rows");
    }
  }

  std::vector<std::size_t> sample;
  for (std::size_t r = 0; r < design.rows(); ++r) {
    if (fixed_row[r]) stage.perfectly_predicted.push_back(r);
    else sample.push_back(r);
  }
  std::vector<Eigen::Index> keep;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < design.columns.size(); ++k)
    if (!dropped[k]) {
      keep.push_back(static_cast<Eigen::Index>(k));
      names.push_back(design.columns[k].name);
    }
  Matrix x(static_cast<Eigen::Index>(sample.size()), static_cast<Eigen::Index>(keep.size()));
  Vector y(static_cast<Eigen::Index>(sample.size()));
  for (std::size_t r = 0; r < sample.size(); ++r) {
    for (std::size_t c = 0; c < keep.size(); ++c)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = design.x(static_cast<Eigen::Index>(sample[r]), keep[c]);
    y(static_cast<Eigen::Index>(r)) = zero(static_cast<Eigen::Index>(sample[r]));
  }
  if (y.sum() == 0.0 || y.sum() == static_cast<double>(sample.size()))
    throw SeparationError("fit_logit_zero_stage: dropped columns leave a single class; prune regressors");

  IrlsOptions irls = opt.irls;
  irls.intercept.reset();
  for (std::size_t c = 0; c < keep.size(); ++c)
    if (design.columns[static_cast<std::size_t>(keep[c])].role == ColumnRole::constant) irls.intercept = c;
  std::optional<Vector> sub_start;
  if (start && start->size() == static_cast<Eigen::Index>(design.columns.size())) {
    sub_start = Vector(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) (*sub_start)(static_cast<Eigen::Index>(c)) = (*start)(keep[c]);
  }
  const GlmFit glm = fit_glm(Family::logit, x, y, names, irls, nullptr, sub_start ? &*sub_start : nullptr);

  const auto p = static_cast<Eigen::Index>(design.columns.size());
  stage.coefficients = Vector::Zero(p);
  stage.covariance = Matrix::Zero(p, p);
  stage.omitted.assign(design.columns.size(), true);
  for (std::size_t a = 0; a < keep.size(); ++a) {
    stage.omitted[static_cast<std::size_t>(keep[a])] = glm.omitted[a];
    stage.coefficients(keep[a]) = glm.beta(static_cast<Eigen::Index>(a));
    for (std::size_t b = 0; b < keep.size(); ++b)
      stage.covariance(keep[a], keep[b]) = glm.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  for (const auto& reason : glm.omitted_reasons) stage.notes.push_back("omitted " + reason);
  stage.p_zero = (design.x * stage.coefficients).unaryExpr([](double v) { return detail::logistic(v); });
  for (auto r : stage.perfectly_predicted) stage.p_zero(static_cast<Eigen::Index>(r)) = zero(static_cast<Eigen::Index>(r));
  stage.loglik = glm.loglik;
  stage.iterations = glm.iterations;
  stage.converged = glm.converged;
  return stage;
}

/// Per-row log-likelihood of the zero-inflated model with zero probability
/// `p_zero` and Poisson mean `mu`.
inline Vector zip_pointwise_loglik(const Vector& y, const Vector& p_zero, const Vector& mu) {
  Vector out(y.size());
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    const double pi = p_zero(r);
    if (y(r) == 0.0) {
      out(r) = std::log(pi + (1.0 - pi) * std::exp(-mu(r)));
    } else {
      out(r) = std::log1p(-pi) + detail::poisson_loglik(y(r), mu(r));
    }
  }
  return out;
}

/// Two-stage zero-inflated Poisson PML.
///
/// Stage 1 fits a logit to the zero-flow indicator; stage 2 fits Poisson PML
/// on the positive-flow dyads. Residuals are w / mu-hat from stage 2. The
/// Vuong statistic compares the zero-inflated model with single-stage PPML
/// on all dyads. Without zero flows the zero stage is skipped and the fit
/// reduces to PPML.
inline GravityFit fit_zippml(const CovariateSet& design, const FitOptions& opt = {}) {
  std::vector<std::size_t> positive;
  for (std::size_t r = 0; r < design.rows(); ++r)
    if (design.response(static_cast<Eigen::Index>(r)) > 0.0) positive.push_back(r);

  if (positive.size() == design.rows()) {
    GravityFit fit = fit_ppml(design, opt);
    fit.estimator = Estimator::zippml;
    fit.diagnostics.notes.push_back("no zero flows: zero stage skipped, estimator reduces to PPML");
    return fit;
  }

  GravityFit fit = detail::skeleton(design, Estimator::zippml);
  fit.zero_stage = fit_logit_zero_stage(design, opt, opt.zero_start);
  const GlmFit glm = detail::poisson_stage(design, positive, opt, opt.start);
  detail::finish_poisson(fit, design, glm, positive);
  fit.pointwise_loglik = zip_pointwise_loglik(design.response, fit.zero_stage->p_zero, fit.fitted);
  fit.diagnostics.loglik = fit.pointwise_loglik.sum();

  for (const auto& n : fit.zero_stage->notes) fit.diagnostics.notes.push_back("zero stage: " + n);
  if (!opt.vuong) return fit;
  FitOptions single_opt = opt;
  single_opt.start = nullptr;
  const GravityFit single = fit_ppml(design, single_opt);
  try {
    const auto v = vuong_test(fit.pointwise_loglik, single.pointwise_loglik);
    fit.diagnostics.vuong_z = v.z;
    fit.diagnostics.vuong_p = v.p_value;
  } catch (const InvalidArgument& e) {
    fit.diagnostics.notes.push_back(std::string("Vuong test unavailable: ") + e.what());
  }
  return fit;
}

/// Log-linear OLS on positive flows, offered as a cross-check. Fitted means
/// are exp(x'b) times the smearing factor mean(exp(residual)).
inline GravityFit fit_ols_log(const CovariateSet& design, const FitOptions& opt = {}) {
  std::vector<std::size_t> positive;
  for (std::size_t r = 0; r < design.rows(); ++r)
    if (design.response(static_cast<Eigen::Index>(r)) > 0.0) positive.push_back(r);
  GravityFit fit = detail::skeleton(design, Estimator::ols_log);
  IrlsOptions irls = opt.irls;
  irls.intercept = detail::intercept_of(design.columns);
  const Matrix x = detail::rows_of(design.x, positive);
  const Vector y = detail::rows_of(design.response, positive).array().log().matrix();
  const GlmFit glm = fit_ols(x, y, detail::names_of(design.columns), irls);
  double smear = 0.0;
  for (Eigen::Index r = 0; r < y.size(); ++r) smear += std::exp(y(r) - glm.eta(r));
  smear /= static_cast<double>(std::max<Eigen::Index>(y.size(), 1));

  fit.coefficients = glm.beta;
  fit.omitted = glm.omitted;
  fit.robust_covariance = glm.covariance;
  fit.fitted = (design.x * glm.beta).unaryExpr([&](double v) { return smear * std::exp(std::min(v, 700.0)); });
  fit.in_sample.assign(design.rows(), false);
  for (auto r : positive) fit.in_sample[r] = true;
  fit.residuals = Vector::Zero(static_cast<Eigen::Index>(design.rows()));
  for (Eigen::Index r = 0; r < fit.residuals.size(); ++r)
    if (design.response(r) > 0.0) fit.residuals(r) = design.response(r) / fit.fitted(r);
  fit.pointwise_loglik = Vector::Zero(static_cast<Eigen::Index>(design.rows()));

  auto& d = fit.diagnostics;
  d.loglik = glm.loglik;
  d.converged = true;
  d.iterations = 1;
  d.n_obs = positive.size();
  d.n_params = glm.estimated_parameters();
  d.notes.push_back("log-linear OLS on positive flows; zero flows omitted");
  for (const auto& reason : glm.omitted_reasons) d.notes.push_back("omitted " + reason);
  std::tie(d.wald_chi2, d.wald_df, d.wald_p) = wald_test(fit.columns, fit.coefficients, fit.robust_covariance, fit.omitted);
  std::size_t k = 0;
  for (std::size_t c = 0; c < fit.columns.size(); ++c)
    if (!fit.omitted[c] && fit.columns[c].role != ColumnRole::constant) ++k;
  if (positive.size() > k + 1)
    d.adj_r2 = adjusted_pseudo_r2(detail::rows_of(design.response, positive), detail::rows_of(fit.fitted, positive), k);
  return fit;
}

inline GravityFit fit(const CovariateSet& design, Estimator estimator, const FitOptions& opt = {}) {
  switch (estimator) {
    case Estimator::zippml: return fit_zippml(design, opt);
    case Estimator::ppml: return fit_ppml(design, opt);
    case Estimator::ols_log: return fit_ols_log(design, opt);
  }
  throw InvalidArgument("unknown estimator");
}

}  // namespace itn::gravity
