#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "itn/error.hpp"
#include "itn/topology.hpp"

namespace itn::stats {

enum class CorrelationMethod { pearson, spearman };

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Midranks (1-based); ties share the average of the ranks they span.
inline std::vector<double> midranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  for (std::size_t k = 0; k < n;) {
    std::size_t end = k + 1;
    while (end < n && x[order[end]] == x[order[k]]) ++end;
    const double avg = (static_cast<double>(k + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t q = k; q < end; ++q) ranks[order[q]] = avg;
    k = end;
  }
  return ranks;
}

/// Two-sided p-value of H0: rho = 0 via t = r sqrt((n-2)/(1-r^2)) on n-2 df.
inline double correlation_p_value(double r, std::size_t n) {
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  const boost::math::students_t_distribution<double> dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

inline CorrelationResult correlation(std::span<const double> x, std::span<const double> y,
                                     CorrelationMethod method = CorrelationMethod::pearson) {
  if (x.size() != y.size()) throw InvalidArgument("correlation: length mismatch");
  if (x.size() < 3) throw InvalidArgument("correlation needs at least three observations");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidArgument("correlation: non-finite value");

  if (method == CorrelationMethod::spearman) {
    const auto rx = midranks(x);
    const auto ry = midranks(y);
    return correlation(std::span<const double>(rx), std::span<const double>(ry), CorrelationMethod::pearson);
  }

  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw InvalidArgument("correlation: zero variance");
  CorrelationResult res;
  res.n = x.size();
  res.coefficient = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  res.p_value = correlation_p_value(res.coefficient, res.n);
  return res;
}

inline CorrelationResult correlation(const Vector& x, const Vector& y,
                                     CorrelationMethod method = CorrelationMethod::pearson) {
  return correlation(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                     std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), method);
}

inline constexpr double significance_level = 0.05;

enum class NodeStatistic { nd, ns, anns, bcc, wcc, rwbc };

inline std::string to_string(NodeStatistic s) {
  switch (s) {
    case NodeStatistic::nd: return "ND";
    case NodeStatistic::ns: return "NS";
    case NodeStatistic::anns: return "ANNS";
    case NodeStatistic::bcc: return "BCC";
    case NodeStatistic::wcc: return "WCC";
    case NodeStatistic::rwbc: return "RWBC";
  }
  return "?";
}

inline Vector statistic_vector(const NodeStatistics& s, NodeStatistic which) {
  switch (which) {
    case NodeStatistic::nd: {
      Vector v(static_cast<Eigen::Index>(s.nd.size()));
      for (std::size_t i = 0; i < s.nd.size(); ++i) v(static_cast<Eigen::Index>(i)) = s.nd[i];
      return v;
    }
    case NodeStatistic::ns: return s.ns;
    case NodeStatistic::anns: return s.anns;
    case NodeStatistic::bcc: return s.bcc;
    case NodeStatistic::wcc: return s.wcc;
    case NodeStatistic::rwbc: return s.rwbc;
  }
  return {};
}

struct CorrelationCell {
  double coefficient = 0.0;
  double p_value = 0.0;
  bool significant = true;  // p < 5%; insignificant cells are the bold ones
  bool defined = true;      // false when a vector has zero variance
};

/// Pairwise Pearson correlations among {NS, ANNS, WCC, RWBC} of the original
/// network, the same four of the residual network and per-capita GDP.
/// `labels` and `cells` are indexed in that order (9 variables).
struct CorrelationTable {
  std::vector<std::string> labels;
  std::vector<std::vector<CorrelationCell>> cells;

  static constexpr std::array<NodeStatistic, 4> statistics{NodeStatistic::ns, NodeStatistic::anns,
                                                           NodeStatistic::wcc, NodeStatistic::rwbc};

  /// Cell for (network a statistic sa) vs (network b statistic sb); networks are 0 = W, 1 = E.
  const CorrelationCell& at(int net_a, std::size_t stat_a, int net_b, std::size_t stat_b) const {
    return cells[static_cast<std::size_t>(net_a) * 4 + stat_a][static_cast<std::size_t>(net_b) * 4 + stat_b];
  }
  const CorrelationCell& with_income(int net, std::size_t stat) const {
    return cells[static_cast<std::size_t>(net) * 4 + stat][8];
  }
};

inline CorrelationTable correlation_table(const NodeStatistics& original, const NodeStatistics& residual,
                                          std::span<const double> pcgdp) {
  if (original.size() != residual.size() || original.size() != pcgdp.size())
    throw InvalidArgument("correlation_table: statistics are not aligned on the same country index");
  CorrelationTable table;
  std::vector<Vector> vars;
  for (const auto* s : {&original, &residual}) {
    const std::string prefix = s == &original ? "W." : "E.";
    for (auto stat : CorrelationTable::statistics) {
      table.labels.push_back(prefix + to_string(stat));
      vars.push_back(statistic_vector(*s, stat));
    }
  }
  table.labels.push_back("pcGDP");
  vars.push_back(Eigen::Map<const Vector>(pcgdp.data(), static_cast<Eigen::Index>(pcgdp.size())));

  const std::size_t k = vars.size();
  table.cells.assign(k, std::vector<CorrelationCell>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      CorrelationCell cell;
      if (a == b) {
        cell.coefficient = 1.0;
        cell.p_value = 0.0;
      } else {
        try {
          const auto r = correlation(vars[a], vars[b]);
          cell.coefficient = r.coefficient;
          cell.p_value = r.p_value;
          cell.significant = r.p_value < significance_level;
        } catch (const InvalidArgument&) {
          cell.coefficient = std::numeric_limits<double>::quiet_NaN();
          cell.p_value = std::numeric_limits<double>::quiet_NaN();
          cell.significant = false;
          cell.defined = false;
        }
      }
      table.cells[a][b] = cell;
      table.cells[b][a] = cell;
    }
  }
  return table;
}

struct RankMove {
  std::size_t node = 0;
  std::size_t rank_original = 0;  // 1 = highest value
  std::size_t rank_residual = 0;
  long displacement = 0;  // rank_residual - rank_original; positive = moved down
};

struct RankComparison {
  NodeStatistic statistic = NodeStatistic::ns;
  CorrelationResult spearman;
  std::vector<RankMove> risers;   // largest moves up, best first
  std::vector<RankMove> fallers;  // largest moves down, worst first
};

/// Ordinal ranks, 1 = largest; ties broken by node index.
inline std::vector<std::size_t> descending_ranks(const Vector& v) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return v(static_cast<Eigen::Index>(a)) > v(static_cast<Eigen::Index>(b));
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[order[k]] = k + 1;
  return rank;
}

inline RankComparison rank_comparison(const NodeStatistics& original, const NodeStatistics& residual,
                                      NodeStatistic statistic, std::size_t top_k = 10) {
  if (original.size() != residual.size())
    throw InvalidArgument("rank_comparison: statistics are not aligned on the same country index");
  const Vector a = statistic_vector(original, statistic);
  const Vector b = statistic_vector(residual, statistic);
  RankComparison out;
  out.statistic = statistic;
  out.spearman = correlation(a, b, CorrelationMethod::spearman);

  const auto ra = descending_ranks(a);
  const auto rb = descending_ranks(b);
  std::vector<RankMove> moves;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const long d = static_cast<long>(rb[i]) - static_cast<long>(ra[i]);
    if (d != 0) moves.push_back({i, ra[i], rb[i], d});
  }
  std::vector<RankMove> up, down;
  for (const auto& m : moves) (m.displacement < 0 ? up : down).push_back(m);
  std::stable_sort(up.begin(), up.end(), [](const auto& x, const auto& y) { return x.displacement < y.displacement; });
  std::stable_sort(down.begin(), down.end(), [](const auto& x, const auto& y) { return x.displacement > y.displacement; });
  if (up.size() > top_k) up.resize(top_k);
  if (down.size() > top_k) down.resize(top_k);
  out.risers = std::move(up);
  out.fallers = std::move(down);
  return out;
}

}  // namespace itn::stats
