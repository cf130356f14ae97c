#pragma once

#include <cstddef>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "itn/error.hpp"
#include "itn/gravity/estimation.hpp"

namespace itn::gravity {

struct SelectionStep {
  std::string block;
  double lr_statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  double loglik_after = 0.0;
};

struct SelectionTrace {
  double alpha = 0.05;
  std::vector<SelectionStep> steps;
  std::vector<std::string> retained;
};

namespace detail {

inline Vector drop_entries(const Vector& v, const std::vector<DesignColumn>& from, const std::vector<DesignColumn>& to) {
  Vector out(static_cast<Eigen::Index>(to.size()));
  std::size_t k = 0;
  for (std::size_t c = 0; c < from.size() && k < to.size(); ++c)
    if (from[c].name == to[k].name) out(static_cast<Eigen::Index>(k++)) = v(static_cast<Eigen::Index>(c));
  return out;
}

inline std::size_t estimated_count(const std::vector<bool>& omitted, const std::vector<DesignColumn>& cols,
                                   const std::string& block) {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (!omitted[c] && cols[c].role == ColumnRole::regressor && cols[c].block == block) ++n;
  return n;
}

inline double selection_loglik(const GravityFit& f) {
  return f.diagnostics.poisson_loglik + (f.zero_stage ? f.zero_stage->loglik : 0.0);
}

}  // namespace detail

/// General-to-specific pruning of regressor blocks.
///
/// Each round refits the model without each remaining block and drops the
/// block with the largest likelihood-ratio p-value while that p-value
/// exceeds `alpha`. The Poisson part of the statistic is scaled by the
/// Pearson dispersion of the current model, since pseudo-likelihood ratios
/// are not chi-squared under overdispersion; the zero-stage part (ZIPPML)
/// enters unscaled. Fixed effects and the constant are never candidates.
inline std::pair<GravityFit, SelectionTrace> select_general_to_specific(const CovariateSet& design, Estimator estimator,
                                                                        double alpha = 0.05, FitOptions opt = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("selection alpha must lie in (0,1)");
  if (estimator == Estimator::ols_log) throw InvalidArgument("general-to-specific selection needs a likelihood estimator");

  SelectionTrace trace;
  trace.alpha = alpha;
  CovariateSet current = design;
  GravityFit current_fit = fit(current, estimator, opt);
  if (!current_fit.diagnostics.converged) throw ConvergenceError("selection: initial model did not converge", {});

  FitOptions refit = opt;
  refit.irls.check_rank = false;
  refit.vuong = false;

  for (;;) {
    const auto candidates = current.blocks();
    if (candidates.empty()) break;
    const double phi = std::max(current_fit.diagnostics.dispersion, 1e-12);
    const double ll_pois = current_fit.diagnostics.poisson_loglik;
    const double ll_zero = current_fit.zero_stage ? current_fit.zero_stage->loglik : 0.0;

    std::optional<SelectionStep> worst;
    for (const auto& block : candidates) {
      const CovariateSet reduced = current.without_blocks({block});
      const Vector start = detail::drop_entries(current_fit.coefficients, current.columns, reduced.columns);
      std::optional<Vector> zero_start;
      if (current_fit.zero_stage)
        zero_start = detail::drop_entries(current_fit.zero_stage->coefficients, current.columns, reduced.columns);
      FitOptions o = refit;
      o.start = &start;
      o.zero_start = zero_start ? &*zero_start : nullptr;
      GravityFit r;
      try {
        r = fit(reduced, estimator, o);
      } catch (const SeparationError&) {
        continue;  // dropping this block leaves a separated zero stage; keep it
      }
      std::size_t df = detail::estimated_count(current_fit.omitted, current.columns, block);
      double lr = 2.0 * (ll_pois - r.diagnostics.poisson_loglik) / phi;
      if (current_fit.zero_stage) {
        df += detail::estimated_count(current_fit.zero_stage->omitted, current.columns, block);
        lr += 2.0 * (ll_zero - r.zero_stage->loglik);
      }
      SelectionStep step{block, std::max(lr, 0.0), df, df == 0 ? 1.0 : detail::chi2_sf(std::max(lr, 0.0), double(df)),
                         detail::selection_loglik(r)};
      if (!worst || step.p_value > worst->p_value) worst = step;
    }
    if (!worst || worst->p_value <= alpha) break;

    trace.steps.push_back(*worst);
    const CovariateSet next = current.without_blocks({worst->block});
    const Vector start = detail::drop_entries(current_fit.coefficients, current.columns, next.columns);
    std::optional<Vector> zero_start;
    if (current_fit.zero_stage)
      zero_start = detail::drop_entries(current_fit.zero_stage->coefficients, current.columns, next.columns);
    FitOptions o = opt;
    o.start = &start;
    o.zero_start = zero_start ? &*zero_start : nullptr;
    o.vuong = false;
    current = next;
    current_fit = fit(current, estimator, o);
  }

  // Final model with full diagnostics.
  current_fit = fit(current, estimator, opt);
  trace.retained = current.blocks();
  return {std::move(current_fit), std::move(trace)};
}

}  // namespace itn::gravity
