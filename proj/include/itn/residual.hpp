#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "itn/error.hpp"
#include "itn/gravity/estimation.hpp"
#include "itn/network.hpp"

namespace itn {

/// How zero-stage information shapes the residual network.
struct ZeroMode {
  enum class Kind { preserve, zip_prune } kind = Kind::preserve;
  double p = 0.5;  // zip_prune: links with P(zero) > p are removed

  static ZeroMode preserve() { return {}; }
  static ZeroMode zip_prune(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("zip_prune probability must lie in [0,1]");
    return {Kind::zip_prune, p};
  }
  std::string describe() const {
    return kind == Kind::preserve ? "preserve" : "zip_prune(" + std::to_string(p) + ")";
  }
};

struct ResidualReport {
  std::size_t positive_links = 0;
  std::size_t unfitted_positive = 0;  // positive links whose dyad was not in the design
  std::size_t pruned = 0;
  double max_residual = 0.0;  // factor removed by renormalization
};

/// Residual network E: e_ij = w_ij / mu-hat_ij on positive dyads, renormalized
/// by its maximum. Positive links whose dyad was rejected from the design get
/// no residual and are reported.
inline WeightedNetwork assemble_residual_network(const gravity::GravityFit& fit, const WeightedNetwork& net,
                                                 ZeroMode mode = {}, ResidualReport* report = nullptr) {
  const std::size_t n = net.size();
  if (fit.n_countries != n) throw InvalidArgument("assemble_residual_network: fit and network index different country sets");
  if (static_cast<std::size_t>(fit.residuals.size()) != fit.dyads.size())
    throw InvalidArgument("assemble_residual_network: fit has no residuals");
  if (mode.kind == ZeroMode::Kind::zip_prune && !fit.zero_stage)
    throw InvalidArgument("assemble_residual_network: zip_prune needs a fit with a zero stage");

  ResidualReport rep;
  rep.positive_links = net.positive_links();
  Matrix e = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::size_t matched = 0;
  for (std::size_t r = 0; r < fit.dyads.size(); ++r) {
    const auto [i, j] = fit.dyads[r];
    if (i >= n || j >= n) throw InvalidArgument("assemble_residual_network: dyad outside the network index");
    const bool positive = net(i, j) > 0.0;
    if (positive != (fit.response(static_cast<Eigen::Index>(r)) > 0.0))
      throw InvalidArgument("assemble_residual_network: fit response and network disagree on link presence");
    if (!positive) continue;
    ++matched;
    if (mode.kind == ZeroMode::Kind::zip_prune && fit.zero_stage->p_zero(static_cast<Eigen::Index>(r)) > mode.p) {
      ++rep.pruned;
      continue;
    }
    const double v = fit.residuals(static_cast<Eigen::Index>(r));
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("assemble_residual_network: invalid residual");
    e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    e(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
  }
  rep.unfitted_positive = rep.positive_links - matched;
  auto out = WeightedNetwork::from_raw(std::move(e), NetworkKind::residual);
  rep.max_residual = out.normalizer();
  if (report) *report = rep;
  return out;
}

}  // namespace itn
