#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "itn/io/fixture.hpp"
#include "itn/pipeline.hpp"

using namespace itn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

AnalysisConfig fixture_config(const std::string& name, std::size_t countries = 30) {
  const auto dir = fs::temp_directory_path() / ("itn_pipeline_" + name);
  fs::remove_all(dir);
  synthetic::WorldOptions wo;
  wo.countries = countries;
  wo.seed = 5;
  io::write_world(synthetic::make_world(wo), (dir / "in").string());
  AnalysisConfig cfg;
  cfg.inputs = {(dir / "in/flows.csv").string(), (dir / "in/countries.csv").string(), (dir / "in/dyads.csv").string(), ""};
  cfg.output = (dir / "out").string();
  return cfg;
}

}  // namespace

TEST(Pipeline, FullRunWritesArtifactsAndManifest) {
  auto cfg = fixture_config("full");
  Pipeline p(cfg);
  p.run_all();
  p.finish();
  const fs::path out(cfg.output);
  for (const char* f : {"manifest.json", "timings.json", "node_statistics_original.csv", "node_statistics_residual.csv",
                        "gravity_report.txt", "correlation_table.csv", "rank_comparison.csv", "distribution_fits.csv",
                        "area_shares.csv", "conditional_mean.csv", "mst_original.csv", "mst_residual.graphml",
                        "network_original.dot", "dyad_fit.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["summary"]["countries"], 30);
  EXPECT_EQ(m["summary"]["dyads_total"], 435);
  EXPECT_TRUE(m["inputs"].size() == 3);
  EXPECT_FALSE(m.contains("timings"));
  const auto header = slurp(out / "node_statistics_original.csv").substr(0, 80);
  EXPECT_NE(header.find("ns_original[weight]"), std::string::npos);
}

TEST(Pipeline, SyntheticWorldRunsWithoutWarnings) {
  auto cfg = fixture_config("clean", 50);
  Pipeline p(cfg);
  p.run_all();
  p.finish();
  const auto m = nlohmann::json::parse(slurp(fs::path(cfg.output) / "manifest.json"));
  EXPECT_EQ(m["status"], "ok");
  EXPECT_TRUE(m["warnings"].empty()) << m["warnings"].dump();
  EXPECT_FALSE(m["notes"].empty());
  for (const auto& a : m["artifacts"]) EXPECT_TRUE(fs::exists(fs::path(cfg.output) / a.get<std::string>())) << a;
}

TEST(Pipeline, StagesAreLazyAndOrdered) {
  auto cfg = fixture_config("lazy", 20);
  Pipeline p(cfg);
  p.statistics(false);
  EXPECT_EQ(p.manifest().stages_completed, (std::vector<std::string>{"ingest", "build", "topology_original"}));
  p.statistics(true);
  EXPECT_EQ(p.manifest().stages_completed.back(), "topology_residual");
  EXPECT_EQ(p.residual_network().size(), 20u);
}

TEST(Pipeline, InvalidConfigIsRejected) {
  auto cfg = fixture_config("invalid", 10);
  cfg.alpha = 1.5;
  EXPECT_THROW(Pipeline{cfg}, InvalidArgument);
  cfg.alpha = 0.05;
  cfg.formats = {"png"};
  EXPECT_THROW(Pipeline{cfg}, InvalidArgument);
  cfg.formats = {"csv"};
  cfg.inputs.flows = "/nonexistent/flows.csv";
  EXPECT_THROW(Pipeline{cfg}, InvalidArgument);
}

TEST(Pipeline, FailureIsRecorded) {
  auto cfg = fixture_config("fail", 10);
  cfg.year = 1990;  // no flows for this year
  Pipeline p(cfg);
  EXPECT_THROW(p.build(), ParseError);
  p.finish();
  const auto m = nlohmann::json::parse(slurp(fs::path(cfg.output) / "manifest.json"));
  EXPECT_EQ(m["status"], "failed");
  EXPECT_EQ(m["failed_stage"], "ingest");
}

TEST(Pipeline, Sha256OfKnownContent) {
  const auto p = fs::temp_directory_path() / "itn_sha_test.txt";
  std::ofstream(p, std::ios::binary) << "abc";
  EXPECT_EQ(sha256_file(p.string()), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove(p);
}
