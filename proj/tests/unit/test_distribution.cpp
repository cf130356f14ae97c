#include <gtest/gtest.h>

#include <random>

#include "itn/stats/area_shares.hpp"
#include "itn/stats/correlation.hpp"
#include "itn/stats/distribution.hpp"
#include "itn/stats/kernel.hpp"
#include "oracles.hpp"

using namespace itn;
using namespace itn::stats;

TEST(RankSize, OrdersAndDropsZeros) {
  const std::vector<double> v{0.5, 0.0, 2.0, 1.0};
  const auto r = rank_size(v);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].value, 2.0);
  EXPECT_EQ(r[0].rank, 1u);
  EXPECT_EQ(r[2].value, 0.5);
  EXPECT_THROW(rank_size(std::vector<double>{0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(rank_size(std::vector<double>{-1.0, 1.0}), InvalidArgument);
}

TEST(PowerLaw, ExactLawRecovered) {
  std::vector<double> v;
  for (int r = 1; r <= 50; ++r) v.push_back(7.0 * std::pow(r, -0.8));
  const auto f = fit_power_law(v);
  EXPECT_NEAR(f.exponent, -0.8, 1e-12);
  EXPECT_NEAR(f.scale, 7.0, 1e-10);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_FALSE(f.degenerate);
}

TEST(PowerLaw, ConstantValuesAreDegenerate) {
  const auto f = fit_power_law(std::vector<double>(10, 3.0));
  EXPECT_TRUE(f.degenerate);
  EXPECT_EQ(f.exponent, 0.0);
  EXPECT_TRUE(std::isnan(f.r_squared));
  EXPECT_THROW(fit_power_law(std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST(PowerLaw, TopKDomain) {
  std::vector<double> v;
  for (int r = 1; r <= 30; ++r) v.push_back(r <= 10 ? std::pow(r, -1.5) : 1e-6);
  const auto f = fit_power_law(std::span<const double>(v), FitDomain{10});
  EXPECT_EQ(f.n_points, 10u);
  EXPECT_NEAR(f.exponent, -1.5, 1e-12);
}

TEST(PowerLaw, ParetoSampleSlope) {
  std::mt19937_64 rng(12);
  const auto x = oracle::pareto_sample(rng, 4000, 2.0);
  const auto f = fit_power_law(x);
  EXPECT_NEAR(f.exponent, -0.5, 0.05);
  EXPECT_NEAR(hill_estimator(x, 400), 2.0, 0.3);
}

TEST(LogNormal, RecoversParameters) {
  std::mt19937_64 rng(13);
  std::lognormal_distribution<double> ln(1.5, 0.7);
  std::vector<double> v(5000);
  for (auto& x : v) x = ln(rng);
  const auto f = fit_log_normal(v);
  EXPECT_NEAR(f.mu, 1.5, 0.05);
  EXPECT_NEAR(f.sigma, 0.7, 0.03);
  EXPECT_LT(f.ks_distance, 0.03);
  EXPECT_THROW(fit_log_normal(std::vector<double>(5, 1.0)), InvalidArgument);
}

TEST(Correlation, PearsonMatchesOracle) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> z;
  std::vector<double> x(200), y(200);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = z(rng);
    y[i] = 0.3 * x[i] + z(rng);
  }
  const auto r = correlation(x, y);
  EXPECT_NEAR(r.coefficient, oracle::pearson(x, y), 1e-12);
  EXPECT_LT(r.p_value, 0.01);
}

TEST(Correlation, PValueReference) {
  // r = 0.5, n = 12: t = 0.5 sqrt(10 / 0.75) = 1.825742, two-sided p on 10 df
  EXPECT_NEAR(correlation_p_value(0.5, 12), 0.09782, 5e-5);
  EXPECT_EQ(correlation_p_value(1.0, 10), 0.0);
  EXPECT_TRUE(std::isnan(correlation_p_value(0.2, 2)));
}

TEST(Correlation, ExactAndConstant) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 6, 8, 10};
  EXPECT_NEAR(correlation(x, y).coefficient, 1.0, 1e-15);
  const std::vector<double> c(5, 1.0);
  EXPECT_THROW(correlation(x, c), InvalidArgument);
  EXPECT_THROW(correlation(std::vector<double>{1, 2}, std::vector<double>{1, 2}), InvalidArgument);
}

TEST(Correlation, SpearmanUsesMidranks) {
  const std::vector<double> x{1, 2, 2, 3};
  EXPECT_EQ(midranks(x), (std::vector<double>{1, 2.5, 2.5, 4}));
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{1, 8, 27, 64, 125};
  EXPECT_NEAR(correlation(a, b, CorrelationMethod::spearman).coefficient, 1.0, 1e-15);
}

TEST(CorrelationTable, LayoutAndSignificance) {
  std::mt19937_64 rng(15);
  const Matrix w = oracle::random_weights(rng, 30, 0.5);
  const Matrix e = oracle::random_weights(rng, 30, 0.5);
  const auto sw = all_statistics(w);
  const auto se = all_statistics(e, NetworkKind::residual);
  std::vector<double> income(30);
  for (int i = 0; i < 30; ++i) income[i] = 1.0 + i;
  const auto t = correlation_table(sw, se, income);
  ASSERT_EQ(t.labels.size(), 9u);
  EXPECT_EQ(t.labels[0], "W.NS");
  EXPECT_EQ(t.labels[8], "pcGDP");
  const auto& cell = t.at(0, 0, 1, 0);
  std::vector<double> a(sw.ns.data(), sw.ns.data() + 30), b(se.ns.data(), se.ns.data() + 30);
  EXPECT_NEAR(cell.coefficient, oracle::pearson(a, b), 1e-12);
  EXPECT_EQ(cell.significant, cell.p_value < 0.05);
  for (std::size_t k = 0; k < 9; ++k) EXPECT_EQ(t.cells[k][k].coefficient, 1.0);
  EXPECT_THROW(correlation_table(sw, se, std::vector<double>(5, 1.0)), InvalidArgument);
}

TEST(RankComparison, Displacements) {
  NodeStatistics a, b;
  a.nd = b.nd = {1, 1, 1, 1};
  a.ns = Vector(4);
  a.ns << 4, 3, 2, 1;
  b.ns = Vector(4);
  b.ns << 1, 3, 2, 4;
  for (auto* s : {&a, &b}) {
    s->anns = s->wcc = s->bcc = s->rwbc = s->ns;
  }
  const auto r = rank_comparison(a, b, NodeStatistic::ns);
  ASSERT_EQ(r.risers.size(), 1u);
  EXPECT_EQ(r.risers[0].node, 3u);
  EXPECT_EQ(r.risers[0].displacement, -3);
  ASSERT_EQ(r.fallers.size(), 1u);
  EXPECT_EQ(r.fallers[0].node, 0u);
  EXPECT_NEAR(r.spearman.coefficient, -0.8, 1e-12);  // 1 - 6*18/(4*15)
}

TEST(Kernel, LinearDataIsReproduced) {
  std::vector<double> x, y;
  for (int i = 0; i < 100; ++i) {
    x.push_back(i);
    y.push_back(2.0 + 0.5 * i);
  }
  const std::vector<double> grid{10.0, 50.0, 90.0};
  const auto c = kernel_conditional_mean(x, y, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(c.mean[k], 2.0 + 0.5 * grid[k], 1e-8);
  EXPECT_TRUE(c.bandwidth_from_cv);
}

TEST(Kernel, BoundsContainTruthOnNoisyData) {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> z(0.0, 0.3);
  std::uniform_real_distribution<double> u(0.0, 6.28);
  std::vector<double> x(800), y(800);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = u(rng);
    y[i] = std::sin(x[i]) + z(rng);
  }
  const auto grid = evaluation_grid(x, 15, KernelAxes::linear);
  const auto c = kernel_conditional_mean(x, y, grid);
  int inside = 0;
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    EXPECT_LE(c.lower[k], c.mean[k]);
    EXPECT_GE(c.upper[k], c.mean[k]);
    EXPECT_NEAR(c.mean[k], std::sin(grid[k]), 0.15);
    inside += c.lower[k] <= std::sin(grid[k]) && std::sin(grid[k]) <= c.upper[k];
  }
  EXPECT_GE(inside, 10);
  EXPECT_NEAR(c.sigma, 0.3, 0.03);
}

TEST(Kernel, InputErrors) {
  std::vector<double> x(10, 1.0), y(10, 1.0);
  EXPECT_THROW(kernel_conditional_mean(x, y, x), InvalidArgument);
  std::vector<double> x2(30), y2(30, 1.0);
  for (int i = 0; i < 30; ++i) x2[i] = i;
  KernelOptions opt;
  opt.axes = KernelAxes::log_log;
  EXPECT_THROW(kernel_conditional_mean(x2, y2, x2, opt), InvalidArgument);  // x = 0 on log axes
  opt.axes = KernelAxes::linear;
  opt.bandwidth = -1.0;
  EXPECT_THROW(kernel_conditional_mean(x2, y2, x2, opt), InvalidArgument);
}

TEST(AreaShares, TwoRegions) {
  std::vector<Country> cs(3);
  for (int k = 0; k < 3; ++k) cs[k].id = k + 1;
  cs[0].region = cs[1].region = "North";
  cs[2].region = "South";
  const CountryTable table(cs);
  Matrix f = Matrix::Zero(3, 3);
  f(0, 1) = 10;  // within North
  f(0, 2) = 5;   // North-South
  f(2, 1) = 5;
  const auto s = area_trade_shares(DirectedFlowMatrix(f, 2000), table);
  ASSERT_EQ(s.regions, (std::vector<std::string>{"North", "South"}));
  // North total: within counted both ways (20) + 10 with South
  EXPECT_NEAR(s.percent[0][0], 100.0 * 20 / 30, 1e-12);
  EXPECT_NEAR(s.percent[0][1], 100.0 * 10 / 30, 1e-12);
  EXPECT_NEAR(s.percent[1][0], 100.0, 1e-12);
  EXPECT_NEAR(s.world_share[0] + s.world_share[1], 100.0, 1e-12);
  for (const auto& row : s.percent) EXPECT_NEAR(row[0] + row[1], 100.0, 1e-12);
}

TEST(AreaShares, MissingRegionIsError) {
  std::vector<Country> cs(2);
  cs[0].id = 1;
  cs[1].id = 2;
  cs[0].region = "A";
  EXPECT_THROW(area_trade_shares(DirectedFlowMatrix(Matrix::Zero(2, 2), 2000), CountryTable(cs)), InvalidArgument);
}
