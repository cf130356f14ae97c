#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "itn/error.hpp"

namespace itn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class NetworkKind { original, residual, mst };

inline std::string_view to_string(NetworkKind k) {
  switch (k) {
    case NetworkKind::original: return "original";
    case NetworkKind::residual: return "residual";
    case NetworkKind::mst: return "mst";
  }
  return "unknown";
}

enum class SymmetrizeMode { arithmetic, geometric };

inline std::string_view to_string(SymmetrizeMode m) {
  return m == SymmetrizeMode::arithmetic ? "arithmetic" : "geometric";
}

namespace detail {

inline void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols())
    throw InvalidArgument(std::string(what) + ": matrix is not square");
}

}  // namespace detail

/// Checks that `w` is a valid undirected weight matrix: square, finite,
/// nonnegative, symmetric (exactly) and with a zero diagonal.
inline void validate_weight_matrix(const Matrix& w) {
  detail::require_square(w, "weight matrix");
  const auto n = w.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w(i, i) != 0.0) throw InvalidArgument("weight matrix: nonzero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = w(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw InvalidArgument("weight matrix: entries must be finite and nonnegative");
      if (v != w(j, i)) throw InvalidArgument("weight matrix: not symmetric");
    }
  }
}

/// Raw directed flows; entry (i, j) is the export value from i to j.
class DirectedFlowMatrix {
public:
  DirectedFlowMatrix() = default;

  DirectedFlowMatrix(Matrix values, int year) : values_(std::move(values)), year_(year) {
    detail::require_square(values_, "flow matrix");
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      if (values_(i, i) != 0.0) throw InvalidArgument("flow matrix: nonzero diagonal");
      for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        const double v = values_(i, j);
        if (!std::isfinite(v) || v < 0.0)
          throw InvalidArgument("flow matrix: entries must be finite and nonnegative");
      }
    }
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  int year() const noexcept { return year_; }

private:
  Matrix values_;
  int year_ = 0;
};

/// Symmetric weight matrix rescaled into [0, 1] by its maximum entry.
///
/// The pre-normalization maximum is kept as `normalizer()` so absolute
/// magnitudes can be recovered with `raw_weights()`. An all-zero input gives
/// a degenerate network (normalizer 0) instead of dividing by zero.
class WeightedNetwork {
public:
  WeightedNetwork() = default;

  /// Normalizes an arbitrary valid symmetric weight matrix by its maximum.
  static WeightedNetwork from_raw(Matrix raw, NetworkKind kind) {
    validate_weight_matrix(raw);
    WeightedNetwork net;
    net.kind_ = kind;
    const double peak = raw.size() == 0 ? 0.0 : raw.maxCoeff();
    if (peak > 0.0) {
      net.weights_ = raw / peak;
      net.normalizer_ = peak;
      net.degenerate_ = false;
    } else {
      net.weights_ = std::move(raw);
      net.normalizer_ = 0.0;
      net.degenerate_ = true;
    }
    return net;
  }

  /// Wraps weights that are already normalized (e.g. re-read from an edge list).
  static WeightedNetwork from_normalized(Matrix weights, NetworkKind kind, double normalizer) {
    validate_weight_matrix(weights);
    const double peak = weights.size() == 0 ? 0.0 : weights.maxCoeff();
    if (peak > 1.0) throw InvalidArgument("normalized weights exceed 1");
    if (peak > 0.0 && peak != 1.0) throw InvalidArgument("normalized weights must peak at exactly 1");
    WeightedNetwork net;
    net.weights_ = std::move(weights);
    net.kind_ = kind;
    net.normalizer_ = peak > 0.0 ? normalizer : 0.0;
    net.degenerate_ = peak == 0.0;
    return net;
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  const Matrix& weights() const noexcept { return weights_; }
  double operator()(std::size_t i, std::size_t j) const {
    return weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  NetworkKind kind() const noexcept { return kind_; }
  double normalizer() const noexcept { return normalizer_; }
  bool degenerate() const noexcept { return degenerate_; }

  Matrix raw_weights() const { return weights_ * normalizer_; }

  std::size_t positive_links() const {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < weights_.rows(); ++i)
      for (Eigen::Index j = i + 1; j < weights_.cols(); ++j)
        if (weights_(i, j) > 0.0) ++count;
    return count;
  }

private:
  Matrix weights_;
  NetworkKind kind_ = NetworkKind::original;
  double normalizer_ = 0.0;
  bool degenerate_ = true;
};

/// Boolean projection of a network: bit (i, j) is set iff w_ij > threshold.
class AdjacencyView {
public:
  AdjacencyView(const Matrix& weights, double threshold) : threshold_(threshold) {
    if (!(threshold >= 0.0)) throw InvalidArgument("adjacency threshold must be nonnegative");
    const auto n = weights.rows();
    bits_ = (weights.array() > threshold).matrix();
    for (Eigen::Index i = 0; i < n; ++i) bits_(i, i) = false;
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(bits_.rows()); }
  double threshold() const noexcept { return threshold_; }
  bool operator()(std::size_t i, std::size_t j) const {
    return bits_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& bits() const noexcept { return bits_; }

  /// Number of undirected edges.
  std::size_t edge_count() const {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < bits_.rows(); ++i)
      for (Eigen::Index j = i + 1; j < bits_.cols(); ++j)
        if (bits_(i, j)) ++count;
    return count;
  }

  /// 0/1 matrix as doubles, for linear algebra.
  Matrix as_matrix() const { return bits_.cast<double>(); }

private:
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> bits_;
  double threshold_ = 0.0;
};

/// Builds the undirected network from directed flows.
/// Arithmetic mode averages the two directions, geometric mode takes their
/// geometric mean; the result is then divided by its maximum entry.
inline WeightedNetwork symmetrize(const DirectedFlowMatrix& flows,
                                  SymmetrizeMode mode = SymmetrizeMode::arithmetic) {
  const Matrix& f = flows.values();
  Matrix sym;
  if (mode == SymmetrizeMode::arithmetic) {
    sym = 0.5 * (f + f.transpose());
  } else {
    sym = (f.array() * f.transpose().array()).sqrt().matrix();
  }
  for (Eigen::Index i = 0; i < sym.rows(); ++i)
    for (Eigen::Index j = i + 1; j < sym.cols(); ++j) sym(j, i) = sym(i, j);
  return WeightedNetwork::from_raw(std::move(sym), NetworkKind::original);
}

inline AdjacencyView adjacency(const WeightedNetwork& net, double threshold = 0.0) {
  return AdjacencyView(net.weights(), threshold);
}

/// Fraction of the n(n-1)/2 possible links present in `view`.
inline double density(const AdjacencyView& view) {
  const std::size_t n = view.size();
  if (n < 2) throw InvalidArgument("density needs at least two nodes");
  return static_cast<double>(view.edge_count()) / (static_cast<double>(n) * (n - 1) / 2.0);
}

/// Fraction of the n(n-1)/2 possible links with positive weight.
inline double density(const WeightedNetwork& net) {
  if (net.size() < 2) throw InvalidArgument("density needs at least two nodes");
  return density(adjacency(net, 0.0));
}

}  // namespace itn
