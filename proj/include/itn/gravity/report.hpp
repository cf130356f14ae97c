#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "itn/gravity/estimation.hpp"
#include "itn/gravity/selection.hpp"
#include "itn/io/export.hpp"

namespace itn::gravity {

inline std::string stars(double p) {
  if (!(p == p)) return "";
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

namespace detail {

inline std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

/// Human-readable coefficient table: estimate with stars, robust SE in
/// parentheses, then the diagnostics block. Fixed effects are summarized.
inline void write_text_report(std::ostream& os, const GravityFit& fit, const SelectionTrace* trace = nullptr) {
  using detail::fixed;
  using detail::pad;
  os << "Gravity equation, estimator " << to_string(fit.estimator) << "\n";
  os << "Dependent variable: symmetric bilateral flow (pre-normalization units)\n\n";
  os << pad("", 24) << pad("Coefficient", 16) << "Robust SE\n";
  std::size_t fe = 0, fe_omitted = 0;
  bool constant = false;
  for (std::size_t k = 0; k < fit.columns.size(); ++k) {
    const auto& c = fit.columns[k];
    if (c.role == ColumnRole::fixed_effect) {
      ++fe;
      if (fit.omitted[k]) ++fe_omitted;
      continue;
    }
    if (c.role == ColumnRole::constant) {
      constant = !fit.omitted[k];
      continue;
    }
    if (fit.omitted[k]) {
      os << pad(c.label, 24) << "(omitted)\n";
      continue;
    }
    os << pad(c.label, 24) << pad(fixed(fit.coefficients(static_cast<Eigen::Index>(k))) + stars(fit.p_value(k)), 16) << "("
       << fixed(fit.standard_error(k)) << ")\n";
  }
  const auto& d = fit.diagnostics;
  os << "\n";
  os << pad("Country fixed effects", 24) << (fe > 0 ? "YES (" + std::to_string(fe - fe_omitted) + " columns)" : "NO") << "\n";
  os << pad("Constant", 24) << (constant ? "YES" : "NO") << "\n";
  os << pad("Observations", 24) << d.n_obs << " of " << fit.dyads.size() << " dyads\n";
  os << pad("Wald chi2", 24) << fixed(d.wald_chi2, 2) << stars(d.wald_p) << " (df " << d.wald_df << ", p " << fixed(d.wald_p, 4)
     << ")\n";
  if (fit.estimator == Estimator::zippml)
    os << pad("Vuong Z", 24) << fixed(d.vuong_z, 2) << stars(d.vuong_p) << " (p " << fixed(d.vuong_p, 4) << ")\n";
  os << pad("Adj. R2", 24) << fixed(d.adj_r2, 4) << "\n";
  os << pad("Log-likelihood", 24) << fixed(d.loglik, 2) << "\n";
  os << pad("Iterations", 24) << d.iterations << (d.converged ? " (converged)" : " (NOT converged)") << "\n";
  if (fit.zero_stage)
    os << pad("Zero-stage iterations", 24) << fit.zero_stage->iterations
       << (fit.zero_stage->converged ? " (converged)" : " (NOT converged)") << "\n";
  os << "\nSignificance: * p<0.05, ** p<0.01, *** p<0.001\n";
  os << "Adj. R2: " << d.adj_r2_definition << "\n";
  if (trace) {
    os << "\nGeneral-to-specific selection (alpha " << fixed(trace->alpha, 3) << ")\n";
    if (trace->steps.empty()) os << "  no block dropped\n";
    for (const auto& s : trace->steps)
      os << "  dropped " << pad(s.block, 6) << " LR " << fixed(s.lr_statistic, 3) << " (df " << s.df << ", p "
         << fixed(s.p_value, 4) << "), log-likelihood after " << fixed(s.loglik_after, 2) << "\n";
    os << "  retained:";
    for (const auto& b : trace->retained) os << " " << b;
    os << "\n";
  }
  if (!d.notes.empty()) {
    os << "\nNotes\n";
    for (const auto& n : d.notes) os << "  " << n << "\n";
  }
}

/// Machine-readable key=value form of the same report, fixed effects included.
inline void write_key_values(std::ostream& os, const GravityFit& fit) {
  using io::num;
  const auto& d = fit.diagnostics;
  os << "estimator=" << to_string(fit.estimator) << "\n";
  os << "n_obs=" << d.n_obs << "\n";
  os << "n_dyads=" << fit.dyads.size() << "\n";
  os << "n_params=" << d.n_params << "\n";
  os << "loglik=" << num(d.loglik) << "\n";
  os << "adj_r2=" << num(d.adj_r2) << "\n";
  os << "adj_r2_definition=" << d.adj_r2_definition << "\n";
  os << "wald_chi2=" << num(d.wald_chi2) << "\n";
  os << "wald_df=" << d.wald_df << "\n";
  os << "wald_p=" << num(d.wald_p) << "\n";
  os << "vuong_z=" << num(d.vuong_z) << "\n";
  os << "vuong_p=" << num(d.vuong_p) << "\n";
  os << "dispersion=" << num(d.dispersion) << "\n";
  os << "iterations=" << d.iterations << "\n";
  os << "converged=" << (d.converged ? 1 : 0) << "\n";
  os << "ridge_used=" << (d.ridge_used ? 1 : 0) << "\n";
  os << "max_score=" << num(d.max_score) << "\n";
  for (std::size_t k = 0; k < fit.columns.size(); ++k) {
    const auto& name = fit.columns[k].name;
    if (fit.omitted[k]) {
      os << "coef." << name << "=omitted\n";
      continue;
    }
    os << "coef." << name << "=" << num(fit.coefficients(static_cast<Eigen::Index>(k))) << "\n";
    os << "se." << name << "=" << num(fit.standard_error(k)) << "\n";
    os << "p." << name << "=" << num(fit.p_value(k)) << "\n";
  }
  if (fit.zero_stage) {
    const auto& z = *fit.zero_stage;
    os << "zero.loglik=" << num(z.loglik) << "\n";
    os << "zero.iterations=" << z.iterations << "\n";
    os << "zero.converged=" << (z.converged ? 1 : 0) << "\n";
    os << "zero.perfectly_predicted=" << z.perfectly_predicted.size() << "\n";
    for (std::size_t k = 0; k < z.columns.size(); ++k)
      if (!z.omitted[k]) os << "zero.coef." << z.columns[k].name << "=" << num(z.coefficients(static_cast<Eigen::Index>(k))) << "\n";
  }
}

}  // namespace itn::gravity
