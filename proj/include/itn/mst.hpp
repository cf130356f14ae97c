#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <tuple>
#include <vector>

#include "itn/error.hpp"
#include "itn/network.hpp"

namespace itn {

/// Disjoint-set forest with union by size and path halving.
class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns false when x and y were already connected.
  bool unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    --sets_;
    return true;
  }

  std::size_t sets() const noexcept { return sets_; }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t sets_;
};

/// d_ij = sqrt(2 (1 - w_ij)) off the diagonal, 0 on it.
inline Matrix mantegna_distance(const Matrix& w) {
  detail::require_square(w, "mantegna_distance");
  const auto n = w.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = w(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("mantegna_distance: weight outside [0, 1]");
      if (i != j) d(i, j) = std::sqrt(2.0 * (1.0 - v));
    }
  }
  return d;
}

inline Matrix mantegna_distance(const WeightedNetwork& net) { return mantegna_distance(net.weights()); }

enum class EdgeUniverse {
  all_pairs,       // complete graph over the metric
  positive_links,  // only pairs with w > 0, i.e. d < sqrt(2)
};

struct TreeEdge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double distance = 0.0;       // raw Mantegna distance
  double scaled_distance = 0.0;  // distance / max tree distance
  double report_weight = 0.0;  // 1 - scaled_distance
};

struct SpanningTree {
  std::size_t n = 0;
  std::vector<TreeEdge> edges;  // in selection order
  double total_distance = 0.0;
  double scale = 0.0;  // maximum tree distance used for rescaling
  std::size_t component_count = 0;
};

/// Kruskal minimum spanning forest over a symmetric distance matrix.
///
/// Candidate edges are scanned by (distance, min endpoint, max endpoint), so
/// the result is reproducible when distances tie. Tree distances are then
/// rescaled by their maximum and each edge gets report weight 1 - scaled.
inline SpanningTree kruskal_mst(const Matrix& distances, EdgeUniverse universe = EdgeUniverse::all_pairs) {
  detail::require_square(distances, "kruskal_mst");
  const auto n = static_cast<std::size_t>(distances.rows());
  if (n < 2) throw InvalidArgument("kruskal_mst needs at least two nodes");
  const double no_link = std::sqrt(2.0);

  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (!std::isfinite(d) || d < 0.0) throw InvalidArgument("kruskal_mst: invalid distance");
      if (universe == EdgeUniverse::positive_links && !(d < no_link)) continue;
      candidates.emplace_back(d, i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  SpanningTree tree;
  tree.n = n;
  UnionFind forest(n);
  for (const auto& [d, i, j] : candidates) {
    if (forest.unite(i, j)) {
      tree.edges.push_back({i, j, d, 0.0, 0.0});
      tree.total_distance += d;
      if (tree.edges.size() == n - 1) break;
    }
  }
  tree.component_count = forest.sets();

  for (const auto& e : tree.edges) tree.scale = std::max(tree.scale, e.distance);
  for (auto& e : tree.edges) {
    e.scaled_distance = tree.scale > 0.0 ? e.distance / tree.scale : 0.0;
    e.report_weight = 1.0 - e.scaled_distance;
  }
  return tree;
}

/// Tree as a symmetric matrix of report weights.
inline Matrix tree_weights(const SpanningTree& tree) {
  const auto n = static_cast<Eigen::Index>(tree.n);
  Matrix w = Matrix::Zero(n, n);
  for (const auto& e : tree.edges) {
    w(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = e.report_weight;
    w(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) = e.report_weight;
  }
  return w;
}

}  // namespace itn
