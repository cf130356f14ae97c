#pragma once

#include <string>
#include <vector>

#include "itn/gravity/design.hpp"

namespace testing_support {

/// Wraps a raw regressor matrix as a design. Column 0 must be the constant;
/// the remaining columns are single-column regressor blocks named x1, x2, ...
inline itn::gravity::CovariateSet raw_design(const itn::Matrix& x, const itn::Vector& y,
                                             std::vector<std::string> names = {}) {
  using namespace itn::gravity;
  CovariateSet s;
  s.fixed_effects = FixedEffects::none;
  s.x = x;
  s.response = y;
  // dyad bookkeeping is nominal; rows are indexed as pairs of a large index
  s.n_countries = static_cast<std::size_t>(x.rows()) + 1;
  for (Eigen::Index r = 0; r < x.rows(); ++r) s.dyads.push_back({static_cast<std::size_t>(r) + 1, 0});
  s.total_dyads = s.dyads.size();
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    std::string name = k < static_cast<Eigen::Index>(names.size()) ? names[k] : (k == 0 ? "const" : "x" + std::to_string(k));
    if (k == 0)
      s.columns.push_back({name, "Constant", "FE", ColumnRole::constant});
    else
      s.columns.push_back({name, name, name, ColumnRole::regressor});
  }
  return s;
}

}  // namespace testing_support
