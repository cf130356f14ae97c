#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "itn/error.hpp"
#include "itn/network.hpp"

// Node statistics for undirected weighted networks. Every function accepts a
// plain symmetric nonnegative matrix (so rescaled or synthetic inputs can be
// used directly) and has an overload for WeightedNetwork.

namespace itn {

enum class ClusteringMode { binary, weighted };

/// Per-node statistic vectors for one network.
struct NodeStatistics {
  NetworkKind network_kind = NetworkKind::original;
  std::vector<int> nd;
  Vector ns;
  Vector anns;
  Vector bcc;
  Vector wcc;
  Vector rwbc;
  std::vector<bool> anns_undefined;        // nd == 0
  std::vector<bool> clustering_undefined;  // nd < 2
  std::vector<bool> rwbc_in_component;     // node belongs to the component RWBC was computed on
  std::vector<std::size_t> component_sizes;  // descending

  std::size_t size() const noexcept { return nd.size(); }
};

inline std::vector<int> node_degree(const Matrix& w) {
  validate_weight_matrix(w);
  const auto n = w.rows();
  std::vector<int> nd(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (w(i, j) > 0.0) ++nd[static_cast<std::size_t>(i)];
  return nd;
}

inline Vector node_strength(const Matrix& w) {
  validate_weight_matrix(w);
  return w.rowwise().sum();
}

/// Average strength of each node's neighbours. Isolated nodes get 0 and are
/// marked in `undefined` when it is supplied.
inline Vector avg_nn_strength(const Matrix& w, std::vector<bool>* undefined = nullptr) {
  validate_weight_matrix(w);
  const auto n = w.rows();
  const Vector ns = w.rowwise().sum();
  Vector anns = Vector::Zero(n);
  if (undefined) undefined->assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    int deg = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (w(i, j) > 0.0) {
        sum += ns(j);
        ++deg;
      }
    }
    if (deg > 0) {
      anns(i) = sum / deg;
    } else if (undefined) {
      (*undefined)[static_cast<std::size_t>(i)] = true;
    }
  }
  return anns;
}

/// Clustering coefficient (Z^3)_ii / (nd_i (nd_i - 1)) with Z the entrywise
/// cube root of W (weighted) or the adjacency matrix (binary).
/// Nodes with fewer than two neighbours get 0.
inline Vector clustering(const Matrix& w, ClusteringMode mode,
                         std::vector<bool>* undefined = nullptr) {
  validate_weight_matrix(w);
  const auto n = w.rows();
  Matrix z;
  if (mode == ClusteringMode::weighted) {
    z = w.unaryExpr([](double v) { return std::cbrt(v); });
  } else {
    z = (w.array() > 0.0).cast<double>().matrix();
  }
  const Matrix z2 = z * z;
  Vector out = Vector::Zero(n);
  if (undefined) undefined->assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    int deg = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (w(i, j) > 0.0) ++deg;
    if (deg < 2) {
      if (undefined) (*undefined)[static_cast<std::size_t>(i)] = true;
      continue;
    }
    const double closed_walks = z2.row(i).dot(z.col(i));
    out(i) = closed_walks / (static_cast<double>(deg) * (deg - 1));
  }
  return out;
}

/// Connected components on the positive-weight support, labelled 0..k-1 in
/// order of their smallest member.
inline std::vector<std::size_t> connected_components(const Matrix& w, std::size_t* count = nullptr) {
  const auto n = static_cast<std::size_t>(w.rows());
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(n, unset);
  std::size_t next = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (label[root] != unset) continue;
    std::queue<std::size_t> frontier;
    frontier.push(root);
    label[root] = next;
    while (!frontier.empty()) {
      const auto u = frontier.front();
      frontier.pop();
      for (std::size_t v = 0; v < n; ++v) {
        if (label[v] == unset && w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0) {
          label[v] = next;
          frontier.push(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

struct RandomWalkBetweenness {
  Vector score;
  std::vector<bool> in_component;
  std::vector<std::size_t> component_sizes;  // descending
};

/// Current-flow (random-walk) betweenness.
///
/// For every source/target pair (s, t) a unit current is injected at s and
/// extracted at t; node potentials solve the weighted Laplacian system. The
/// throughput of a node i outside {s, t} is half the sum over its links of
/// w_ij |V_i - V_j|. Scores are averaged over the (m-1)(m-2)/2 pairs not
/// containing the node, m being the size of the component analysed.
///
/// Disconnected inputs are handled on the largest connected component only
/// (ties go to the component with the smallest member); other nodes score 0.
inline RandomWalkBetweenness rw_betweenness_detail(const Matrix& w) {
  validate_weight_matrix(w);
  const auto n = static_cast<std::size_t>(w.rows());
  RandomWalkBetweenness out;
  out.score = Vector::Zero(static_cast<Eigen::Index>(n));
  out.in_component.assign(n, false);
  if (n == 0) return out;

  std::size_t ncomp = 0;
  const auto label = connected_components(w, &ncomp);
  std::vector<std::size_t> sizes(ncomp, 0);
  for (auto l : label) ++sizes[l];
  const auto largest = static_cast<std::size_t>(
      std::distance(sizes.begin(), std::max_element(sizes.begin(), sizes.end())));
  out.component_sizes = sizes;
  std::sort(out.component_sizes.begin(), out.component_sizes.end(), std::greater<>());

  std::vector<std::size_t> members;
  for (std::size_t v = 0; v < n; ++v)
    if (label[v] == largest) members.push_back(v);
  for (auto v : members) out.in_component[v] = true;

  const auto m = static_cast<Eigen::Index>(members.size());
  if (m < 3) return out;

  Matrix sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      sub(a, b) = w(static_cast<Eigen::Index>(members[static_cast<std::size_t>(a)]),
                    static_cast<Eigen::Index>(members[static_cast<std::size_t>(b)]));

  // Laplacian grounded at the last node; its inverse, padded with a zero row
  // and column, maps injected currents to potentials.
  Matrix lap = -sub;
  lap.diagonal() = sub.rowwise().sum();
  Eigen::LLT<Matrix> llt(lap.topLeftCorner(m - 1, m - 1));
  if (llt.info() != Eigen::Success)
    throw Error("random-walk betweenness: singular Laplacian on a connected component");
  Matrix potentials = Matrix::Zero(m, m);
  potentials.topLeftCorner(m - 1, m - 1) = llt.solve(Matrix::Identity(m - 1, m - 1));

  struct Link {
    Eigen::Index a, b;
    double weight;
  };
  std::vector<Link> links;
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = a + 1; b < m; ++b)
      if (sub(a, b) > 0.0) links.push_back({a, b, sub(a, b)});

  Vector acc = Vector::Zero(m);
  Vector v(m);
  for (Eigen::Index s = 0; s < m; ++s) {
    for (Eigen::Index t = s + 1; t < m; ++t) {
      v = potentials.col(s) - potentials.col(t);
      for (const auto& link : links) {
        const double half_flow = 0.5 * link.weight * std::abs(v(link.a) - v(link.b));
        if (link.a != s && link.a != t) acc(link.a) += half_flow;
        if (link.b != s && link.b != t) acc(link.b) += half_flow;
      }
    }
  }
  const double pairs = static_cast<double>(m - 1) * static_cast<double>(m - 2) / 2.0;
  for (Eigen::Index a = 0; a < m; ++a)
    out.score(static_cast<Eigen::Index>(members[static_cast<std::size_t>(a)])) = acc(a) / pairs;
  return out;
}

inline Vector rw_betweenness(const Matrix& w) { return rw_betweenness_detail(w).score; }

inline NodeStatistics all_statistics(const Matrix& w, NetworkKind kind = NetworkKind::original) {
  NodeStatistics s;
  s.network_kind = kind;
  s.nd = node_degree(w);
  s.ns = node_strength(w);
  s.anns = avg_nn_strength(w, &s.anns_undefined);
  s.bcc = clustering(w, ClusteringMode::binary, &s.clustering_undefined);
  s.wcc = clustering(w, ClusteringMode::weighted);
  auto rw = rw_betweenness_detail(w);
  s.rwbc = std::move(rw.score);
  s.rwbc_in_component = std::move(rw.in_component);
  s.component_sizes = std::move(rw.component_sizes);
  return s;
}

inline std::vector<int> node_degree(const WeightedNetwork& net) { return node_degree(net.weights()); }
inline Vector node_strength(const WeightedNetwork& net) { return node_strength(net.weights()); }
inline Vector avg_nn_strength(const WeightedNetwork& net, std::vector<bool>* undefined = nullptr) {
  return avg_nn_strength(net.weights(), undefined);
}
inline Vector clustering(const WeightedNetwork& net, ClusteringMode mode,
                         std::vector<bool>* undefined = nullptr) {
  return clustering(net.weights(), mode, undefined);
}
inline Vector rw_betweenness(const WeightedNetwork& net) { return rw_betweenness(net.weights()); }
inline NodeStatistics all_statistics(const WeightedNetwork& net) {
  return all_statistics(net.weights(), net.kind());
}

}  // namespace itn
