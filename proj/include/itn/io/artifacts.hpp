#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "itn/country.hpp"
#include "itn/gravity/design.hpp"
#include "itn/gravity/selection.hpp"
#include "itn/io/export.hpp"
#include "itn/stats/area_shares.hpp"
#include "itn/stats/correlation.hpp"
#include "itn/stats/distribution.hpp"
#include "itn/stats/kernel.hpp"
#include "itn/topology.hpp"

// CSV and text writers for the analysis artifacts. Numeric column headers
// follow <statistic>_<network kind>[<unit>].

namespace itn::io {

inline void write_node_statistics(std::ostream& os, const NodeStatistics& s, const CountryTable& countries) {
  const std::string k(to_string(s.network_kind));
  os << "id,acronym,nd_" << k << "[links],ns_" << k << "[weight],anns_" << k << "[weight],bcc_" << k << "[1],wcc_" << k
     << "[1],rwbc_" << k << "[1],anns_undefined_" << k << "[flag],clustering_undefined_" << k << "[flag],rwbc_component_" << k
     << "[flag]\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    os << countries[i].id << ',' << csv_field(countries[i].acronym) << ',' << s.nd[i] << ',' << num(s.ns(e)) << ','
       << num(s.anns(e)) << ',' << num(s.bcc(e)) << ',' << num(s.wcc(e)) << ',' << num(s.rwbc(e)) << ','
       << (s.anns_undefined[i] ? 1 : 0) << ',' << (s.clustering_undefined[i] ? 1 : 0) << ','
       << (s.rwbc_in_component[i] ? 1 : 0) << '\n';
  }
}

inline void write_rank_size(std::ostream& os, const std::vector<stats::RankedValue>& series, const stats::RankSizeFit& fit,
                            const std::string& variable, const std::string& kind) {
  os << "rank[1]," << variable << '_' << kind << "[value],fitted_" << variable << '_' << kind << "[value]\n";
  for (const auto& p : series)
    os << p.rank << ',' << num(p.value) << ',' << num(fit.scale * std::pow(static_cast<double>(p.rank), fit.exponent)) << '\n';
}

struct DistributionRow {
  std::string kind;
  std::string variable;
  stats::RankSizeFit power_law;
  double hill = std::numeric_limits<double>::quiet_NaN();
  std::size_t hill_k = 0;
  std::optional<stats::LogNormalFit> log_normal;
};

inline void write_distribution_fits(std::ostream& os, const std::vector<DistributionRow>& rows) {
  os << "network,variable,exponent[1],scale[value],r_squared[1],n_points[count],degenerate[flag],hill_alpha[1],hill_k[count],"
        "lognormal_mu[log value],lognormal_sigma[log value],lognormal_ks[1],lognormal_n[count]\n";
  for (const auto& r : rows) {
    os << r.kind << ',' << r.variable << ',' << num(r.power_law.exponent) << ',' << num(r.power_law.scale) << ','
       << num(r.power_law.r_squared) << ',' << r.power_law.n_points << ',' << (r.power_law.degenerate ? 1 : 0) << ','
       << num(r.hill) << ',' << r.hill_k << ',';
    if (r.log_normal)
      os << num(r.log_normal->mu) << ',' << num(r.log_normal->sigma) << ',' << num(r.log_normal->ks_distance) << ','
         << r.log_normal->n << '\n';
    else
      os << "nan,nan,nan,0\n";
  }
}

inline void write_correlation_csv(std::ostream& os, const stats::CorrelationTable& t) {
  os << "variable_a,variable_b,pearson[1],p_value[1],significant_5pct[flag],defined[flag]\n";
  for (std::size_t a = 0; a < t.labels.size(); ++a)
    for (std::size_t b = 0; b < t.labels.size(); ++b) {
      const auto& c = t.cells[a][b];
      os << t.labels[a] << ',' << t.labels[b] << ',' << num(c.coefficient) << ',' << num(c.p_value) << ','
         << (c.significant ? 1 : 0) << ',' << (c.defined ? 1 : 0) << '\n';
    }
}

/// Lower-triangular text layout; insignificant coefficients are wrapped in [ ].
inline void write_correlation_text(std::ostream& os, const stats::CorrelationTable& t) {
  char buf[32];
  os << "Pearson correlations (5% significance; [x] = not significant)\n";
  os << std::string(8, ' ');
  for (const auto& l : t.labels) {
    std::snprintf(buf, sizeof buf, "%10s", l.c_str());
    os << buf;
  }
  os << '\n';
  for (std::size_t a = 0; a < t.labels.size(); ++a) {
    std::snprintf(buf, sizeof buf, "%-8s", t.labels[a].c_str());
    os << buf;
    for (std::size_t b = 0; b <= a; ++b) {
      const auto& c = t.cells[a][b];
      if (!c.defined)
        std::snprintf(buf, sizeof buf, "%10s", "n/a");
      else if (a == b || c.significant)
        std::snprintf(buf, sizeof buf, "%10.4f", c.coefficient);
      else
        std::snprintf(buf, sizeof buf, "  [%6.4f]", c.coefficient);
      os << buf;
    }
    os << '\n';
  }
}

inline void write_rank_comparison(std::ostream& os, const std::vector<stats::RankComparison>& rows,
                                  const CountryTable& countries) {
  os << "statistic,spearman[1],p_value[1],direction,acronym,rank_original[rank],rank_residual[rank],displacement[rank]\n";
  for (const auto& r : rows) {
    const std::string head = to_string(r.statistic) + "," + num(r.spearman.coefficient) + "," + num(r.spearman.p_value);
    if (r.risers.empty() && r.fallers.empty()) os << head << ",none,,,,\n";
    for (const auto* list : {&r.risers, &r.fallers})
      for (const auto& m : *list)
        os << head << ',' << (list == &r.risers ? "up" : "down") << ',' << csv_field(countries[m.node].acronym) << ','
           << m.rank_original << ',' << m.rank_residual << ',' << m.displacement << '\n';
  }
}

inline void write_area_shares(std::ostream& os, const stats::AreaShares& s) {
  os << "region";
  for (const auto& r : s.regions) os << ",share_with_" << csv_field(r) << "[percent]";
  os << ",world_share[percent],total_trade[flow units]\n";
  for (std::size_t a = 0; a < s.regions.size(); ++a) {
    os << csv_field(s.regions[a]);
    for (double p : s.percent[a]) os << ',' << num(p);
    os << ',' << num(s.world_share[a]) << ',' << num(s.total_trade[a]) << '\n';
  }
}

inline void write_area_shares_text(std::ostream& os, const stats::AreaShares& s) {
  char buf[64];
  os << "Total trade within and between areas (% of row area's trade)\n";
  std::snprintf(buf, sizeof buf, "%-14s", "");
  os << buf;
  for (const auto& r : s.regions) {
    std::snprintf(buf, sizeof buf, "%12.12s", r.c_str());
    os << buf;
  }
  os << "    World %\n";
  for (std::size_t a = 0; a < s.regions.size(); ++a) {
    std::snprintf(buf, sizeof buf, "%-14.14s", s.regions[a].c_str());
    os << buf;
    for (double p : s.percent[a]) {
      std::snprintf(buf, sizeof buf, "%12.2f", p);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%13.2f", s.world_share[a]);
    os << buf << '\n';
  }
}

inline void write_conditional_mean(std::ostream& os, const stats::ConditionalMeanCurve& c) {
  os << "gdp_product[gdp^2],mean_flow_original[flow units],lower95_original[flow units],upper95_original[flow units],"
        "effective_n[count]\n";
  for (std::size_t k = 0; k < c.x.size(); ++k)
    os << num(c.x[k]) << ',' << num(c.mean[k]) << ',' << num(c.lower[k]) << ',' << num(c.upper[k]) << ','
       << num(c.effective_n[k]) << '\n';
}

inline void write_rejected(std::ostream& os, const std::vector<gravity::RejectedDyad>& rejected, const CountryTable& countries) {
  os << "id_a,id_b,reason\n";
  for (const auto& r : rejected)
    os << countries[r.i].id << ',' << countries[r.j].id << ',' << csv_field(r.reason) << '\n';
}

inline void write_selection_trace(std::ostream& os, const gravity::SelectionTrace& t) {
  os << "step,block,lr_statistic[chi2],df[count],p_value[1],loglik_after[loglik]\n";
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& s = t.steps[k];
    os << k + 1 << ',' << s.block << ',' << num(s.lr_statistic) << ',' << s.df << ',' << num(s.p_value) << ','
       << num(s.loglik_after) << '\n';
  }
}

inline void write_dyad_fit(std::ostream& os, const gravity::GravityFit& fit, const CountryTable& countries) {
  os << "id_a,id_b,flow_original[flow units],fitted_mean[flow units],residual_eta[ratio],in_stage2[flag],p_zero[probability]\n";
  for (std::size_t r = 0; r < fit.dyads.size(); ++r) {
    const auto e = static_cast<Eigen::Index>(r);
    os << countries[fit.dyads[r].i].id << ',' << countries[fit.dyads[r].j].id << ',' << num(fit.response(e)) << ','
       << num(fit.fitted(e)) << ',' << num(fit.residuals(e)) << ',' << (fit.in_sample[r] ? 1 : 0) << ','
       << (fit.zero_stage ? num(fit.zero_stage->p_zero(e)) : std::string("nan")) << '\n';
  }
}

}  // namespace itn::io
