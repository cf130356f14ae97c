// itn: trade-network analysis from dyadic flow data.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "itn/itn.hpp"

namespace {

struct Settings {
  itn::AnalysisConfig cfg;
  std::string symmetrize = "arithmetic";
  std::string estimator = "zippml";
  std::string zero_mode = "preserve";
  double zip_prune_p = 0.5;
  std::string mst_universe = "all_pairs";
  std::string fixed_effects = "country";
  bool selection = true;
  bool logit_fixed_effects = true;
  std::vector<std::string> formats{"csv", "dot", "graphml"};
  std::vector<std::string> blocks = itn::gravity::all_blocks();
};

template <class T>
T pick(const std::map<std::string, T>& table, const std::string& key, const char* what) {
  auto it = table.find(key);
  if (it == table.end()) throw itn::InvalidArgument(std::string("unknown ") + what + " '" + key + "'");
  return it->second;
}

itn::AnalysisConfig resolve(Settings s) {
  using namespace itn;
  s.cfg.symmetrize = pick<SymmetrizeMode>(
      {{"arithmetic", SymmetrizeMode::arithmetic}, {"geometric", SymmetrizeMode::geometric}}, s.symmetrize, "symmetrize mode");
  s.cfg.estimator = pick<gravity::Estimator>({{"zippml", gravity::Estimator::zippml},
                                              {"ppml", gravity::Estimator::ppml},
                                              {"ols_log", gravity::Estimator::ols_log}},
                                             s.estimator, "estimator");
  if (s.zero_mode == "preserve") s.cfg.zero_mode = ZeroMode::preserve();
  else if (s.zero_mode == "zip_prune") s.cfg.zero_mode = ZeroMode::zip_prune(s.zip_prune_p);
  else throw InvalidArgument("unknown zero_mode '" + s.zero_mode + "'");
  s.cfg.mst_universe = pick<EdgeUniverse>(
      {{"all_pairs", EdgeUniverse::all_pairs}, {"positive_links", EdgeUniverse::positive_links}}, s.mst_universe,
      "mst_universe");
  s.cfg.fixed_effects = pick<gravity::FixedEffects>(
      {{"country", gravity::FixedEffects::country}, {"none", gravity::FixedEffects::none}}, s.fixed_effects,
      "fixed_effects");
  s.cfg.selection = s.selection;
  s.cfg.logit_fixed_effects = s.logit_fixed_effects;
  s.cfg.formats = s.formats;
  s.cfg.blocks = s.blocks;
  return s.cfg;
}

int ingest_check(const itn::AnalysisConfig& cfg) {
  const auto data = itn::io::ingest(cfg.inputs, cfg.year);
  const auto w = itn::symmetrize(data.flows, cfg.symmetrize);
  std::size_t directed = 0;
  for (std::size_t i = 0; i < data.flows.size(); ++i)
    for (std::size_t j = 0; j < data.flows.size(); ++j)
      if (data.flows(i, j) > 0.0) ++directed;
  std::size_t records = 0;
  for (std::size_t a = 0; a < data.countries.size(); ++a)
    for (std::size_t b = a + 1; b < data.countries.size(); ++b)
      if (data.covariates.has(a, b)) ++records;
  std::cout << "countries: " << data.countries.size() << "\n"
            << "year: " << data.flows.year() << "\n"
            << "positive directed flows: " << directed << "\n"
            << "positive links: " << w.positive_links() << "\n"
            << "dyad records: " << records << "\n";
  if (w.size() >= 2) std::cout << "density: " << itn::io::num(itn::density(w)) << "\n";
  for (const auto& msg : data.notes) std::cout << "note: " << msg << "\n";
  for (const auto& msg : data.warnings) std::cout << "warning: " << msg << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted trade-network analysis: gravity residuals and topology"};
  app.set_version_flag("--version", std::string(itn::version));
  app.set_config("--config", "", "key=value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  Settings s;
  auto& c = s.cfg;
  app.add_option("--flows", c.inputs.flows, "flows CSV (exporter_id,importer_id,year,value)");
  app.add_option("--countries", c.inputs.countries, "countries CSV");
  app.add_option("--dyads", c.inputs.dyads, "dyad covariates CSV");
  app.add_option("--distances", c.inputs.distances, "optional distance CSV (id_a,id_b,distance_km)");
  app.add_option("--year", c.year, "year to analyse")->capture_default_str();
  app.add_option("--symmetrize", s.symmetrize, "arithmetic|geometric")->capture_default_str();
  app.add_option("--estimator", s.estimator, "zippml|ppml|ols_log")->capture_default_str();
  app.add_option("--selection", s.selection, "general-to-specific block selection (true/false)")->capture_default_str();
  app.add_option("--alpha", c.alpha, "retention significance for selection")->capture_default_str();
  app.add_option("--zero_mode", s.zero_mode, "preserve|zip_prune")->capture_default_str();
  app.add_option("--zip_prune_p", s.zip_prune_p, "zero-probability cutoff for zip_prune")->capture_default_str();
  app.add_option("--mst_universe", s.mst_universe, "all_pairs|positive_links")->capture_default_str();
  app.add_option("--fixed_effects", s.fixed_effects, "country|none")->capture_default_str();
  app.add_option("--logit_fixed_effects", s.logit_fixed_effects, "fixed effects in the zero stage (true/false)")
      ->capture_default_str();
  app.add_option("--blocks", s.blocks, "regressor blocks of the initial model")->delimiter(',')->capture_default_str();
  app.add_option("--top_fraction", c.top_fraction, "fraction of heaviest links kept in graph exports")->capture_default_str();
  app.add_option("--format", s.formats, "graph formats: csv, dot, graphml")->delimiter(',')->capture_default_str();
  app.add_option("--output", c.output, "output directory")->capture_default_str();
  app.add_option("--seed", c.seed, "seed for synthetic fixtures")->capture_default_str();

  auto* cmd_ingest = app.add_subcommand("ingest-check", "validate inputs and print a summary");
  auto* cmd_stats = app.add_subcommand("stats", "node statistics of the original network");
  bool stats_residual = false;
  cmd_stats->add_flag("--with-residual", stats_residual, "also compute the residual network statistics");
  auto* cmd_gravity = app.add_subcommand("gravity", "estimate the gravity equation");
  auto* cmd_residual = app.add_subcommand("residual", "build the residual network and its statistics");
  auto* cmd_compare = app.add_subcommand("compare", "correlation and rank comparison of original and residual");
  auto* cmd_mst = app.add_subcommand("mst", "Mantegna-distance minimal spanning trees");
  bool mst_original_only = false;
  cmd_mst->add_flag("--original-only", mst_original_only, "skip the residual network");
  auto* cmd_dist = app.add_subcommand("dist", "rank-size, log-normal, conditional-mean and area-share tables");
  bool dist_residual = false;
  cmd_dist->add_flag("--with-residual", dist_residual, "include the residual network");
  auto* cmd_export = app.add_subcommand("export", "write network graph files");
  bool export_residual = false;
  cmd_export->add_flag("--with-residual", export_residual, "also export the residual network");
  auto* cmd_run = app.add_subcommand("run", "full pipeline");
  auto* cmd_synth = app.add_subcommand("synth", "write a synthetic input fixture");
  std::size_t synth_n = 50;
  bool synth_zero_free = false;
  cmd_synth->add_option("--size", synth_n, "number of countries")->capture_default_str();
  cmd_synth->add_flag("--zero-free", synth_zero_free, "no structural zeros");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_synth->parsed()) {
      itn::synthetic::WorldOptions wopt;
      wopt.countries = synth_n;
      wopt.seed = c.seed;
      wopt.year = c.year;
      wopt.structural_zeros = !synth_zero_free;
      itn::io::write_world(itn::synthetic::make_world(wopt), c.output);
      std::cout << "wrote " << c.output << "/{flows,countries,dyads}.csv\n";
      return 0;
    }
    const auto cfg = resolve(s);
    if (cmd_ingest->parsed()) {
      cfg.validate();
      return ingest_check(cfg);
    }
    itn::Pipeline pipeline(cfg);
    try {
      if (cmd_stats->parsed()) pipeline.statistics(stats_residual);
      else if (cmd_gravity->parsed()) pipeline.fit();
      else if (cmd_residual->parsed()) pipeline.statistics(true);
      else if (cmd_compare->parsed()) pipeline.compare();
      else if (cmd_mst->parsed()) pipeline.mst(!mst_original_only);
      else if (cmd_dist->parsed()) pipeline.distributions(dist_residual);
      else if (cmd_export->parsed()) pipeline.export_graphs(export_residual);
      else if (cmd_run->parsed()) pipeline.run_all();
    } catch (...) {
      pipeline.finish();
      throw;
    }
    pipeline.finish();
    for (const auto& w : pipeline.manifest().warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "artifacts written to " << cfg.output << "\n";
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "itn: error: " << ex.what() << "\n";
    return 1;
  }
}
