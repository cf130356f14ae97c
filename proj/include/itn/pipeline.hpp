#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "itn/country.hpp"
#include "itn/error.hpp"
#include "itn/gravity/design.hpp"
#include "itn/gravity/estimation.hpp"
#include "itn/gravity/report.hpp"
#include "itn/gravity/selection.hpp"
#include "itn/io/artifacts.hpp"
#include "itn/io/csv.hpp"
#include "itn/io/export.hpp"
#include "itn/mst.hpp"
#include "itn/network.hpp"
#include "itn/residual.hpp"
#include "itn/stats/area_shares.hpp"
#include "itn/stats/correlation.hpp"
#include "itn/stats/distribution.hpp"
#include "itn/stats/kernel.hpp"
#include "itn/topology.hpp"

#ifndef ITN_VERSION
#define ITN_VERSION "0.0.0"
#endif

namespace itn {

inline constexpr const char* version = ITN_VERSION;

struct AnalysisConfig {
  io::InputPaths inputs;
  int year = 2000;
  SymmetrizeMode symmetrize = SymmetrizeMode::arithmetic;
  gravity::Estimator estimator = gravity::Estimator::zippml;
  bool selection = true;
  double alpha = 0.05;
  ZeroMode zero_mode;
  EdgeUniverse mst_universe = EdgeUniverse::all_pairs;
  std::string output = "itn-out";
  std::uint64_t seed = 1;
  gravity::FixedEffects fixed_effects = gravity::FixedEffects::country;
  bool logit_fixed_effects = true;
  std::vector<std::string> blocks = gravity::all_blocks();
  double top_fraction = 0.01;
  std::vector<std::string> formats{"csv", "dot", "graphml"};
  std::size_t top_movers = 10;

  void validate() const {
    for (const auto* p : {&inputs.flows, &inputs.countries, &inputs.dyads})
      if (p->empty()) throw InvalidArgument("flows, countries and dyads input paths are required");
    for (const auto* p : {&inputs.flows, &inputs.countries, &inputs.dyads, &inputs.distances})
      if (!p->empty() && !std::filesystem::exists(*p)) throw InvalidArgument("input file not found: " + *p);
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw InvalidArgument("top_fraction must lie in (0,1]");
    for (const auto& f : formats) io::parse_graph_format(f);
    for (const auto& b : blocks)
      if (std::find(gravity::all_blocks().begin(), gravity::all_blocks().end(), b) == gravity::all_blocks().end())
        throw InvalidArgument("unknown regressor block '" + b + "'");
  }
};

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

/// Record of one run. Warnings and informational notes are kept once each,
/// in order of emission.
/// Timings are kept apart so the manifest itself is reproducible.
struct RunManifest {
  nlohmann::ordered_json config;
  nlohmann::ordered_json inputs;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<std::string> stages_completed;
  std::optional<std::string> failed_stage;
  std::string failure;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
  std::vector<std::string> artifacts;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();

  void warn(const std::string& w) {
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }

  void note(const std::string& n) {
    if (std::find(notes.begin(), notes.end(), n) == notes.end()) notes.push_back(n);
  }

  static nlohmann::ordered_json definitions() {
    return {{"adjusted_r2", gravity::adjusted_r2_definition},
            {"rwbc",
             "current-flow betweenness on the largest connected component: for each source-target pair the Laplacian "
             "is solved for unit current, half the absolute current on each incident link is summed per intermediate "
             "node, and the total is divided by (m-1)(m-2)/2 for a component of m nodes; other nodes get 0"},
            {"kernel_bandwidth", "least-squares leave-one-out cross-validation over a 30-point geometric grid"},
            {"residual_normalization", "E is divided by its own maximum residual; the factor is reported"},
            {"mst_rescaling", "tree distances divided by the largest distance on the tree; report weight 1 - scaled"},
            {"conditional_mean_axes", "pre-normalization symmetric flows against GDP_i * GDP_j, log-log"}};
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["software"] = {{"name", "itn"}, {"version", version}};
    j["config"] = config;
    j["inputs"] = inputs;
    j["status"] = failed_stage ? "failed" : "ok";
    if (failed_stage) j["failed_stage"] = *failed_stage, j["failure"] = failure;
    j["stages_completed"] = stages_completed;
    j["summary"] = summary;
    j["warnings"] = warnings;
    j["notes"] = notes;
    j["definitions"] = definitions();
    j["artifacts"] = artifacts;
    return j;
  }
};

/// Stages of the analysis. Each stage pulls in the ones it depends on, times
/// itself and writes its artifacts into the output directory.
class Pipeline {
public:
  explicit Pipeline(AnalysisConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    manifest_.config = config_json();
    std::filesystem::create_directories(cfg_.output);
  }

  const AnalysisConfig& config() const noexcept { return cfg_; }
  RunManifest& manifest() noexcept { return manifest_; }

  void ingest() {
    if (data_) return;
    stage("ingest", [&] {
      data_ = io::ingest(cfg_.inputs, cfg_.year);
      for (const auto* p : {&cfg_.inputs.flows, &cfg_.inputs.countries, &cfg_.inputs.dyads, &cfg_.inputs.distances})
        if (!p->empty()) manifest_.inputs[*p] = {{"sha256", sha256_file(*p)}};
      for (const auto& w : data_->warnings) manifest_.warn(w);
      for (const auto& n : data_->notes) manifest_.note(n);
      manifest_.summary["countries"] = data_->countries.size();
      manifest_.summary["year"] = cfg_.year;
    });
  }

  void build() {
    if (w_) return;
    ingest();
    stage("build", [&] {
      w_ = symmetrize(data_->flows, cfg_.symmetrize);
      if (w_->degenerate()) manifest_.warn("original network is empty (all flows zero)");
      manifest_.summary["normalizer_original"] = w_->normalizer();
      manifest_.summary["positive_links_original"] = w_->positive_links();
      if (w_->size() >= 2) manifest_.summary["density_original"] = density(*w_);
    });
  }

  void fit() {
    if (fit_) return;
    build();
    stage("gravity", [&] {
      gravity::DesignOptions dopt;
      dopt.fixed_effects = cfg_.fixed_effects;
      dopt.blocks = cfg_.blocks;
      design_ = gravity::build_design(data_->countries, data_->covariates, w_->raw_weights(), dopt);
      for (const auto& n : design_->notes) manifest_.note("design: " + n);
      if (!design_->rejected.empty())
        manifest_.warn(std::to_string(design_->rejected.size()) + " dyads rejected from the design (see rejected_dyads.csv)");
      gravity::FitOptions fopt;
      fopt.logit_fixed_effects = cfg_.logit_fixed_effects;
      if (cfg_.selection && cfg_.estimator != gravity::Estimator::ols_log) {
        auto [f, trace] = gravity::select_general_to_specific(*design_, cfg_.estimator, cfg_.alpha, fopt);
        fit_ = std::move(f);
        trace_ = std::move(trace);
      } else {
        if (cfg_.selection) manifest_.warn("selection skipped: ols_log has no likelihood-ratio selection");
        fit_ = gravity::fit(*design_, cfg_.estimator, fopt);
      }
      if (!fit_->diagnostics.converged) throw ConvergenceError("gravity fit did not converge", {});
      if (fit_->zero_stage && !fit_->zero_stage->converged) throw ConvergenceError("zero stage did not converge", {});
      for (const auto& n : fit_->diagnostics.notes) manifest_.note("gravity: " + n);

      write("rejected_dyads.csv", [&](std::ostream& os) { io::write_rejected(os, design_->rejected, data_->countries); });
      write("gravity_report.txt",
            [&](std::ostream& os) { gravity::write_text_report(os, *fit_, trace_ ? &*trace_ : nullptr); });
      write("gravity_fit.txt", [&](std::ostream& os) { gravity::write_key_values(os, *fit_); });
      write("dyad_fit.csv", [&](std::ostream& os) { io::write_dyad_fit(os, *fit_, data_->countries); });
      if (trace_) write("selection_trace.csv", [&](std::ostream& os) { io::write_selection_trace(os, *trace_); });

      const std::size_t total = design_->total_dyads;
      manifest_.summary["dyads_total"] = total;
      manifest_.summary["dyads_estimated"] = design_->rows();
      manifest_.summary["dyads_dropped"] = total - design_->rows();
      manifest_.summary["stage2_observations"] = fit_->diagnostics.n_obs;
      manifest_.summary["estimator"] = gravity::to_string(fit_->estimator);
      manifest_.summary["adj_r2"] = fit_->diagnostics.adj_r2;
      manifest_.summary["vuong_z"] = json_number(fit_->diagnostics.vuong_z);
      if (trace_) {
        std::vector<std::string> dropped;
        for (const auto& s : trace_->steps) dropped.push_back(s.block);
        manifest_.summary["selection_dropped"] = dropped;
        manifest_.summary["selection_retained"] = trace_->retained;
      }
    });
  }

  void residual() {
    if (e_) return;
    fit();
    stage("residual", [&] {
      ResidualReport rep;
      e_ = assemble_residual_network(*fit_, *w_, cfg_.zero_mode, &rep);
      if (rep.unfitted_positive > 0)
        manifest_.warn(std::to_string(rep.unfitted_positive) + " positive links have no residual (dyad not estimated)");
      if (rep.pruned > 0) manifest_.warn(std::to_string(rep.pruned) + " links pruned by " + cfg_.zero_mode.describe());
      manifest_.summary["zero_mode"] = cfg_.zero_mode.describe();
      manifest_.summary["normalizer_residual"] = rep.max_residual;
      manifest_.summary["positive_links_residual"] = e_->positive_links();
      if (e_->size() >= 2) manifest_.summary["density_residual"] = density(*e_);
    });
  }

  void statistics(bool with_residual) {
    build();
    if (!stats_w_) {
      stage("topology_original", [&] {
        stats_w_ = all_statistics(*w_);
        note_components(*stats_w_);
        write("node_statistics_original.csv",
              [&](std::ostream& os) { io::write_node_statistics(os, *stats_w_, data_->countries); });
      });
    }
    if (with_residual && !stats_e_) {
      residual();
      stage("topology_residual", [&] {
        stats_e_ = all_statistics(*e_);
        note_components(*stats_e_);
        write("node_statistics_residual.csv",
              [&](std::ostream& os) { io::write_node_statistics(os, *stats_e_, data_->countries); });
      });
    }
  }

  void distributions(bool with_residual) {
    statistics(with_residual);
    stage("distributions", [&] {
      std::vector<io::DistributionRow> rows;
      std::vector<std::pair<const WeightedNetwork*, const NodeStatistics*>> nets{{&*w_, &*stats_w_}};
      if (with_residual) nets.emplace_back(&*e_, &*stats_e_);
      for (const auto& [net, st] : nets) {
        const std::string kind(to_string(net->kind()));
        std::vector<double> weights;
        for (std::size_t i = 0; i < net->size(); ++i)
          for (std::size_t j = i + 1; j < net->size(); ++j)
            if ((*net)(i, j) > 0.0) weights.push_back((*net)(i, j));
        distribution_row(rows, kind, "weight", weights);
        for (auto s : {stats::NodeStatistic::ns, stats::NodeStatistic::anns, stats::NodeStatistic::wcc,
                       stats::NodeStatistic::rwbc}) {
          const Vector v = stats::statistic_vector(*st, s);
          distribution_row(rows, kind, lower(stats::to_string(s)), std::vector<double>(v.data(), v.data() + v.size()));
        }
      }
      write("distribution_fits.csv", [&](std::ostream& os) { io::write_distribution_fits(os, rows); });

      write("area_shares.csv", [&](std::ostream& os) {
        io::write_area_shares(os, stats::area_trade_shares(data_->flows, data_->countries));
      });
      write("area_shares.txt", [&](std::ostream& os) {
        io::write_area_shares_text(os, stats::area_trade_shares(data_->flows, data_->countries));
      });

      std::vector<double> mass, flow;
      const Matrix raw = w_->raw_weights();
      for (std::size_t i = 0; i < w_->size(); ++i)
        for (std::size_t j = i + 1; j < w_->size(); ++j) {
          const double g = data_->countries[i].gdp * data_->countries[j].gdp;
          const double f = raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          if (f > 0.0 && g > 0.0) {
            mass.push_back(g);
            flow.push_back(f);
          }
        }
      if (mass.size() >= 20) {
        stats::KernelOptions kopt;
        kopt.axes = stats::KernelAxes::log_log;
        const auto grid = stats::evaluation_grid(mass, 50, kopt.axes);
        const auto curve = stats::kernel_conditional_mean(mass, flow, grid, kopt);
        write("conditional_mean.csv", [&](std::ostream& os) { io::write_conditional_mean(os, curve); });
        manifest_.summary["kernel_bandwidth_log"] = curve.bandwidth;
      } else {
        manifest_.warn("conditional mean skipped: fewer than 20 positive links");
      }
    });
  }

  void compare() {
    statistics(true);
    stage("compare", [&] {
      const auto pcgdp = data_->countries.gdp_per_capita();
      const auto table = stats::correlation_table(*stats_w_, *stats_e_, pcgdp);
      write("correlation_table.csv", [&](std::ostream& os) { io::write_correlation_csv(os, table); });
      write("correlation_table.txt", [&](std::ostream& os) { io::write_correlation_text(os, table); });
      for (std::size_t a = 0; a < table.labels.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
          if (!table.cells[a][b].defined)
            manifest_.warn("correlation " + table.labels[a] + " vs " + table.labels[b] + " undefined (zero variance)");

      std::vector<stats::RankComparison> ranks;
      for (auto s : {stats::NodeStatistic::ns, stats::NodeStatistic::anns, stats::NodeStatistic::wcc,
                     stats::NodeStatistic::rwbc}) {
        try {
          ranks.push_back(stats::rank_comparison(*stats_w_, *stats_e_, s, cfg_.top_movers));
          manifest_.summary["spearman_" + lower(stats::to_string(s))] = ranks.back().spearman.coefficient;
        } catch (const InvalidArgument& ex) {
          manifest_.warn("rank comparison " + stats::to_string(s) + ": " + ex.what());
        }
      }
      write("rank_comparison.csv", [&](std::ostream& os) { io::write_rank_comparison(os, ranks, data_->countries); });

      // Link-level comparison over links present in both networks.
      std::vector<double> wv, ev, gdp, dist;
      const Matrix d = data_->covariates.distance_matrix();
      for (std::size_t i = 0; i < w_->size(); ++i)
        for (std::size_t j = i + 1; j < w_->size(); ++j)
          if ((*w_)(i, j) > 0.0 && (*e_)(i, j) > 0.0) {
            wv.push_back((*w_)(i, j));
            ev.push_back((*e_)(i, j));
            gdp.push_back(std::log(data_->countries[i].gdp * data_->countries[j].gdp));
            dist.push_back(std::log(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
          }
      write("link_correlations.csv", [&](std::ostream& os) {
        os << "pair,pearson[1],p_value[1],n[count]\n";
        auto row = [&](const char* name, const std::vector<double>& a, const std::vector<double>& b) {
          bool finite = a.size() >= 3;
          for (double v : b) finite = finite && std::isfinite(v);
          if (!finite) {
            os << name << ",nan,nan," << a.size() << '\n';
            return;
          }
          try {
            const auto r = stats::correlation(a, b);
            os << name << ',' << io::num(r.coefficient) << ',' << io::num(r.p_value) << ',' << r.n << '\n';
            manifest_.summary[std::string("corr_") + name] = r.coefficient;
          } catch (const InvalidArgument&) {
            os << name << ",nan,nan," << a.size() << '\n';
          }
        };
        row("weight_original:weight_residual", wv, ev);
        row("weight_residual:log_gdp_product", ev, gdp);
        row("weight_residual:log_distance", ev, dist);
      });
    });
  }

  void mst(bool with_residual) {
    build();
    if (with_residual) residual();
    stage("mst", [&] {
      std::vector<const WeightedNetwork*> nets{&*w_};
      if (with_residual) nets.push_back(&*e_);
      for (const auto* net : nets) {
        if (net->size() < 2) {
          manifest_.warn("mst skipped: fewer than two countries");
          continue;
        }
        const auto tree = kruskal_mst(mantegna_distance(*net), cfg_.mst_universe);
        const std::string kind(to_string(net->kind()));
        manifest_.summary["mst_" + kind + "_scale"] = tree.scale;
        manifest_.summary["mst_" + kind + "_components"] = tree.component_count;
        if (tree.component_count > 1)
          manifest_.warn("mst of " + kind + " network is a forest with " + std::to_string(tree.component_count) + " components");
        const auto g = io::graph_of(tree);
        for (const auto& f : cfg_.formats)
          write("mst_" + kind + "." + f,
                [&](std::ostream& os) { io::write_graph(os, g, data_->countries, io::parse_graph_format(f)); });
      }
    });
  }

  void export_graphs(bool with_residual) {
    build();
    if (with_residual) residual();
    stage("export", [&] {
      std::vector<const WeightedNetwork*> nets{&*w_};
      if (with_residual) nets.push_back(&*e_);
      for (const auto* net : nets) {
        const std::string kind(to_string(net->kind()));
        const auto g = io::top_fraction(io::graph_of(*net), cfg_.top_fraction);
        for (const auto& f : cfg_.formats)
          write("network_" + kind + "." + f,
                [&](std::ostream& os) { io::write_graph(os, g, data_->countries, io::parse_graph_format(f)); });
      }
    });
  }

  void run_all() {
    distributions(true);
    compare();
    mst(true);
    export_graphs(true);
  }

  /// Writes manifest.json and timings.json. Call after success or failure.
  void finish() {
    write_raw("manifest.json", manifest_.to_json().dump(2) + "\n");
    write_raw("timings.json", manifest_.timings.dump(2) + "\n");
  }

  const io::IngestResult& data() const { return *data_; }
  const WeightedNetwork& original() const { return *w_; }
  const WeightedNetwork& residual_network() const { return *e_; }
  const gravity::GravityFit& gravity_fit() const { return *fit_; }

private:
  static std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  }

  static nlohmann::ordered_json json_number(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
  }

  nlohmann::ordered_json config_json() const {
    nlohmann::ordered_json j;
    j["flows"] = cfg_.inputs.flows;
    j["countries"] = cfg_.inputs.countries;
    j["dyads"] = cfg_.inputs.dyads;
    j["distances"] = cfg_.inputs.distances;
    j["year"] = cfg_.year;
    j["symmetrize"] = std::string(to_string(cfg_.symmetrize));
    j["estimator"] = gravity::to_string(cfg_.estimator);
    j["selection"] = cfg_.selection;
    j["alpha"] = cfg_.alpha;
    j["zero_mode"] = cfg_.zero_mode.describe();
    j["mst_universe"] = cfg_.mst_universe == EdgeUniverse::all_pairs ? "all_pairs" : "positive_links";
    j["fixed_effects"] = cfg_.fixed_effects == gravity::FixedEffects::country ? "country" : "none";
    j["logit_fixed_effects"] = cfg_.logit_fixed_effects;
    j["blocks"] = cfg_.blocks;
    j["top_fraction"] = cfg_.top_fraction;
    j["formats"] = cfg_.formats;
    j["seed"] = cfg_.seed;
    j["output"] = cfg_.output;
    return j;
  }

  void note_components(const NodeStatistics& s) {
    if (s.component_sizes.size() > 1)
      manifest_.warn(std::string(to_string(s.network_kind)) + " network is disconnected (" +
                     std::to_string(s.component_sizes.size()) + " components); RWBC computed on the largest");
    std::size_t isolated = 0;
    for (bool u : s.anns_undefined) isolated += u ? 1 : 0;
    if (isolated > 0)
      manifest_.warn(std::string(to_string(s.network_kind)) + " network has " + std::to_string(isolated) +
                     " isolated countries (ANNS undefined)");
  }

  void distribution_row(std::vector<io::DistributionRow>& rows, const std::string& kind, const std::string& variable,
                        const std::vector<double>& values) {
    std::vector<double> positive;
    for (double v : values)
      if (v > 0.0) positive.push_back(v);
    if (positive.size() < 3) {
      manifest_.warn("rank-size fit of " + variable + " (" + kind + ") skipped: fewer than three positive values");
      return;
    }
    io::DistributionRow row;
    row.kind = kind;
    row.variable = variable;
    const auto series = stats::rank_size(positive);
    row.power_law = stats::fit_power_law(std::span<const stats::RankedValue>(series));
    if (row.power_law.degenerate)
      manifest_.warn("rank-size fit of " + variable + " (" + kind + ") is degenerate (all values equal)");
    row.hill_k = std::max<std::size_t>(2, positive.size() / 10);
    if (row.hill_k < positive.size()) row.hill = stats::hill_estimator(positive, row.hill_k);
    if (positive.size() >= 10) row.log_normal = stats::fit_log_normal(positive);
    write("rank_size_" + variable + "_" + kind + ".csv",
          [&](std::ostream& os) { io::write_rank_size(os, series, row.power_law, variable, kind); });
    rows.push_back(std::move(row));
  }

  void stage(const std::string& name, const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const std::exception& ex) {
      manifest_.failed_stage = name;
      manifest_.failure = ex.what();
      manifest_.timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      throw;
    }
    manifest_.timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest_.stages_completed.push_back(name);
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ostringstream os;
    body(os);
    write_raw(name, os.str());
    if (std::find(manifest_.artifacts.begin(), manifest_.artifacts.end(), name) == manifest_.artifacts.end())
      manifest_.artifacts.push_back(name);
  }

  void write_raw(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::path(cfg_.output) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
  }

  AnalysisConfig cfg_;
  RunManifest manifest_;
  std::optional<io::IngestResult> data_;
  std::optional<WeightedNetwork> w_, e_;
  std::optional<gravity::CovariateSet> design_;
  std::optional<gravity::GravityFit> fit_;
  std::optional<gravity::SelectionTrace> trace_;
  std::optional<NodeStatistics> stats_w_, stats_e_;
};

}  // namespace itn
