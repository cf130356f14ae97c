#include <gtest/gtest.h>

#include <random>

#include "designs.hpp"
#include "itn/gravity/estimation.hpp"
#include "itn/gravity/report.hpp"
#include "itn/gravity/selection.hpp"
#include "itn/synthetic.hpp"
#include "oracles.hpp"

using namespace itn;
using namespace itn::gravity;
using testing_support::raw_design;

namespace {

struct PoissonData {
  Matrix x;
  Vector y;
};

PoissonData poisson_data(std::uint64_t seed, int n, double b0, double b1, double b2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  PoissonData d;
  d.x.resize(n, 3);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    d.x(i, 0) = 1;
    d.x(i, 1) = z(rng);
    d.x(i, 2) = z(rng) > 0 ? 1.0 : 0.0;
    std::poisson_distribution<int> p(std::exp(b0 + b1 * d.x(i, 1) + b2 * d.x(i, 2)));
    d.y(i) = p(rng);
  }
  return d;
}

/// Robust sandwich for a Poisson fit computed from scratch; `hc3` divides
/// each residual by one minus its leverage.
Matrix sandwich(const Matrix& x, const Vector& y, const Vector& mu, bool hc3) {
  const auto n = static_cast<double>(x.rows()), k = static_cast<double>(x.cols());
  Matrix bread = Matrix::Zero(x.cols(), x.cols()), meat = Matrix::Zero(x.cols(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Vector xi = x.row(i).transpose();
    bread += mu(i) * xi * xi.transpose();
  }
  const Matrix inv = bread.fullPivLu().inverse();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Vector xi = x.row(i).transpose();
    const double h = mu(i) * xi.dot(inv * xi);
    const double e = (y(i) - mu(i)) / (hc3 ? 1.0 - h : 1.0);
    meat += e * e * xi * xi.transpose();
  }
  return (hc3 ? 1.0 : n / (n - k)) * inv * meat * inv;
}

}  // namespace

TEST(Ppml, ScoreIsZeroAtSolution) {
  const auto d = poisson_data(1, 800, 0.5, 0.7, -0.4);
  const auto fit = fit_ppml(raw_design(d.x, d.y));
  EXPECT_TRUE(fit.diagnostics.converged);
  const Vector score = d.x.transpose() * (d.y - fit.fitted);
  EXPECT_LT(score.cwiseAbs().maxCoeff(), 1e-6 * d.y.sum());
  EXPECT_NEAR(fit.coefficients(1), 0.7, 0.1);
  EXPECT_NEAR(fit.coefficients(2), -0.4, 0.15);
}

TEST(Ppml, RobustCovarianceMatchesSandwich) {
  const auto d = poisson_data(2, 500, 1.0, 0.3, 0.2);
  const auto fit = fit_ppml(raw_design(d.x, d.y));
  const Matrix ref = sandwich(d.x, d.y, fit.fitted, true);
  EXPECT_LT((fit.robust_covariance - ref).cwiseAbs().maxCoeff(), 1e-8 * ref.cwiseAbs().maxCoeff());
  EXPECT_NEAR(fit.standard_error(1), std::sqrt(ref(1, 1)), 1e-8);

  FitOptions opt;
  opt.irls.sandwich = Sandwich::hc1;
  const auto hc1 = fit_ppml(raw_design(d.x, d.y), opt);
  const Matrix ref1 = sandwich(d.x, d.y, hc1.fitted, false);
  EXPECT_LT((hc1.robust_covariance - ref1).cwiseAbs().maxCoeff(), 1e-8 * ref1.cwiseAbs().maxCoeff());
}

TEST(Ppml, DistantStartReachesSameSolution) {
  const auto d = poisson_data(5, 400, 0.5, 0.7, -0.4);
  const auto ref = fit_ppml(raw_design(d.x, d.y));
  const Vector far = Vector::Constant(3, -20.0);
  FitOptions opt;
  opt.start = &far;
  const auto fit = fit_ppml(raw_design(d.x, d.y), opt);
  EXPECT_TRUE(fit.diagnostics.converged);
  EXPECT_LT((fit.coefficients - ref.coefficients).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Glm, SeparatedLogitIsReportedNotAccepted) {
  Matrix x(40, 2);
  Vector y(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = i - 19.5;
    y(i) = i < 20 ? 0.0 : 1.0;
  }
  IrlsOptions opt;
  opt.intercept = 0;
  EXPECT_THROW(fit_glm(Family::logit, x, y, {"const", "x"}, opt), Error);
}

TEST(Ppml, LeverageInflatesStandardErrors) {
  // one dominant observation: HC3 must not report a smaller SE than HC1
  auto d = poisson_data(13, 200, 0.5, 0.4, 0.2);
  d.x(0, 1) = 6.0;
  d.y(0) = std::exp(0.5 + 0.4 * 6.0);
  FitOptions opt;
  opt.irls.sandwich = Sandwich::hc1;
  const auto a = fit_ppml(raw_design(d.x, d.y), opt);
  const auto b = fit_ppml(raw_design(d.x, d.y));
  EXPECT_GT(b.standard_error(1), a.standard_error(1));
}

TEST(Ppml, ResidualsAreRatios) {
  const auto d = poisson_data(3, 300, 0.2, 0.5, 0.0);
  const auto fit = fit_ppml(raw_design(d.x, d.y));
  for (Eigen::Index r = 0; r < d.y.size(); ++r) {
    if (d.y(r) > 0) EXPECT_NEAR(fit.residuals(r), d.y(r) / fit.fitted(r), 1e-12);
    else EXPECT_EQ(fit.residuals(r), 0.0);
  }
}

TEST(Ppml, ScaleEquivariantSlopes) {
  const auto d = poisson_data(4, 400, 0.0, 0.6, 0.3);
  const auto a = fit_ppml(raw_design(d.x, d.y));
  const auto b = fit_ppml(raw_design(d.x, d.y * 1000.0));
  EXPECT_NEAR(a.coefficients(1), b.coefficients(1), 1e-7);
  EXPECT_NEAR(b.coefficients(0) - a.coefficients(0), std::log(1000.0), 1e-7);
}

TEST(Ppml, CollinearDesignIsRejected) {
  auto d = poisson_data(5, 100, 0.0, 0.5, 0.5);
  Matrix x(100, 4);
  x << d.x, d.x.col(1) * 2.0;
  try {
    fit_ppml(raw_design(x, d.y));
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_FALSE(e.columns().empty());
  }
}

TEST(Ppml, ConstantRegressorIsOmitted) {
  auto d = poisson_data(6, 100, 0.0, 0.5, 0.5);
  d.x.col(2).setConstant(1.0);
  const auto fit = fit_ppml(raw_design(d.x, d.y));
  EXPECT_TRUE(fit.omitted[2]);
  EXPECT_FALSE(fit.omitted[1]);
  EXPECT_EQ(fit.coefficients(2), 0.0);
}

TEST(Ppml, NonConvergenceRaises) {
  const auto d = poisson_data(7, 200, 0.0, 0.5, 0.5);
  FitOptions opt;
  opt.irls.max_iterations = 1;
  EXPECT_THROW(fit_ppml(raw_design(d.x, d.y), opt), ConvergenceError);
}

TEST(Logit, PerfectPredictorIsDropped) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  const int n = 400;
  Matrix x(n, 3);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1;
    x(i, 1) = z(rng);
    x(i, 2) = i % 10 == 0 ? 1.0 : 0.0;  // rows with this dummy always trade
    const double p0 = 1.0 / (1.0 + std::exp(-(-0.5 + 1.2 * x(i, 1))));
    std::poisson_distribution<int> pois(5.0);
    y(i) = x(i, 2) == 1.0 ? 1.0 + pois(rng) : (std::uniform_real_distribution<double>(0, 1)(rng) < p0 ? 0.0 : 1.0 + pois(rng));
  }
  const auto stage = fit_logit_zero_stage(raw_design(x, y));
  EXPECT_TRUE(stage.omitted[2]);
  EXPECT_EQ(stage.perfectly_predicted.size(), 40u);
  for (auto r : stage.perfectly_predicted) EXPECT_EQ(stage.p_zero(static_cast<Eigen::Index>(r)), 0.0);
  EXPECT_NEAR(stage.coefficients(1), 1.2, 0.35);
  EXPECT_TRUE(stage.converged);
}

TEST(Logit, SingleClassIsError) {
  const auto d = poisson_data(9, 50, 3.0, 0.1, 0.1);
  Vector y = d.y.array() + 1.0;
  EXPECT_THROW(fit_logit_zero_stage(raw_design(d.x, y)), InvalidArgument);
}

TEST(Vuong, IdenticalModelsAreIndistinguishable) {
  const Vector a = Vector::LinSpaced(10, -3, -1);
  EXPECT_THROW(vuong_test(a, a), InvalidArgument);
  const Vector b = a.array() - 0.5;
  EXPECT_THROW(vuong_test(a, b), InvalidArgument);  // constant difference has no spread
}

TEST(Vuong, FormulaAndSign) {
  Vector a(4), b(4);
  a << -1, -2, -1.5, -1;
  b << -2, -2, -2, -1.5;
  // d = 1, 0, .5, .5 ; mean .5, population sd sqrt(.125)
  const auto v = vuong_test(a, b);
  EXPECT_NEAR(v.z, std::sqrt(4.0) * 0.5 / std::sqrt(0.125), 1e-12);
  EXPECT_NEAR(vuong_test(b, a).z, -v.z, 1e-12);
}

TEST(Zippml, FavoursZeroInflationOnZipData) {
  std::mt19937_64 rng(10);
  const auto s = oracle::zip_sample(rng, 2000, 1.0, 0.5, -0.3, 1.0);
  const auto fit = fit_zippml(raw_design(s.x, s.y));
  ASSERT_TRUE(fit.zero_stage.has_value());
  EXPECT_GT(fit.diagnostics.vuong_z, 1.96);
  EXPECT_LT(fit.diagnostics.n_obs, 2000u);
  EXPECT_NEAR(fit.diagnostics.loglik, fit.pointwise_loglik.sum(), 1e-9);
}

TEST(Zippml, ZeroFreeDataReducesToPpml) {
  const auto d = poisson_data(11, 200, 3.0, 0.2, 0.1);
  Vector y = d.y.array() + 1.0;
  const auto a = fit_zippml(raw_design(d.x, y));
  const auto b = fit_ppml(raw_design(d.x, y));
  EXPECT_FALSE(a.zero_stage.has_value());
  EXPECT_EQ(a.estimator, Estimator::zippml);
  EXPECT_LT((a.coefficients - b.coefficients).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(OlsLog, ExactLogLinearData) {
  const int n = 60;
  Matrix x(n, 2);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1;
    x(i, 1) = i / 10.0;
    y(i) = std::exp(0.3 + 1.7 * x(i, 1));
  }
  const auto fit = fit_ols_log(raw_design(x, y));
  EXPECT_NEAR(fit.coefficients(0), 0.3, 1e-10);
  EXPECT_NEAR(fit.coefficients(1), 1.7, 1e-10);
  EXPECT_LT((fit.residuals.array() - 1.0).abs().maxCoeff(), 1e-9);
}

TEST(Wald, SingleSlope) {
  std::vector<DesignColumn> cols{{"const", "", "FE", ColumnRole::constant}, {"x", "", "x", ColumnRole::regressor}};
  Vector beta(2);
  beta << 5.0, 2.0;
  Matrix cov = Matrix::Identity(2, 2) * 0.25;
  const auto [chi2, df, p] = wald_test(cols, beta, cov, {false, false});
  EXPECT_NEAR(chi2, 16.0, 1e-12);
  EXPECT_EQ(df, 1u);
  EXPECT_NEAR(p, 6.334248e-05, 1e-9);
}

TEST(PseudoR2, Definition) {
  Vector o(5), f(5);
  o << 1, 2, 3, 4, 5;
  f << 1.1, 1.9, 3.2, 3.9, 5.1;
  std::vector<double> ov(o.data(), o.data() + 5), fv(f.data(), f.data() + 5);
  const double r = oracle::pearson(ov, fv);
  EXPECT_NEAR(adjusted_pseudo_r2(o, f, 1), 1.0 - (1.0 - r * r) * 4.0 / 3.0, 1e-14);
  EXPECT_THROW(adjusted_pseudo_r2(o, f, 4), InvalidArgument);
}

TEST(Design, ColumnsAndAbsorption) {
  synthetic::WorldOptions wo;
  wo.countries = 20;
  wo.seed = 4;
  const auto world = synthetic::make_world(wo);
  const auto net = symmetrize(world.flows, SymmetrizeMode::arithmetic);
  DesignOptions o;
  const auto fe = build_design(world.countries, world.covariates, net.raw_weights(), o);
  EXPECT_FALSE(fe.find_column("log_gdp_i").has_value());
  EXPECT_TRUE(fe.find_column("log_dist").has_value());
  EXPECT_EQ(fe.rows(), 190u);
  std::size_t fe_cols = 0;
  for (const auto& c : fe.columns) fe_cols += c.role == ColumnRole::fixed_effect;
  EXPECT_EQ(fe_cols, 19u);
  // presence columns: each row has exactly two ones unless it involves the reference country
  for (Eigen::Index r = 0; r < fe.x.rows(); ++r) {
    double s = 0;
    for (std::size_t k = 0; k < fe.columns.size(); ++k)
      if (fe.columns[k].role == ColumnRole::fixed_effect) s += fe.x(r, static_cast<Eigen::Index>(k));
    const auto& d = fe.dyads[static_cast<std::size_t>(r)];
    EXPECT_EQ(s, (d.j == 0 || d.i == 0) ? 1.0 : 2.0);
  }
  o.fixed_effects = FixedEffects::none;
  const auto plain = build_design(world.countries, world.covariates, net.raw_weights(), o);
  const auto k = *plain.find_column("log_gdp_i");
  const auto& d0 = plain.dyads[0];
  EXPECT_NEAR(plain.x(0, static_cast<Eigen::Index>(k)), std::log(world.countries[d0.i].gdp), 1e-12);
  EXPECT_THROW(build_design(world.countries, world.covariates, Matrix::Zero(3, 3), o), InvalidArgument);
  o.blocks = {"GDP", "NOPE"};
  EXPECT_THROW(build_design(world.countries, world.covariates, net.raw_weights(), o), InvalidArgument);
}

TEST(Design, MissingRecordsAreRejected) {
  synthetic::WorldOptions wo;
  wo.countries = 6;
  auto world = synthetic::make_world(wo);
  world.covariates.get(1, 0).reset();
  world.covariates.get(2, 0)->distance_km.reset();
  const auto net = symmetrize(world.flows, SymmetrizeMode::arithmetic);
  const auto d = build_design(world.countries, world.covariates, net.raw_weights());
  EXPECT_EQ(d.rows(), 13u);
  ASSERT_EQ(d.rejected.size(), 2u);
  EXPECT_EQ(d.rejected[0].reason, "no covariate record");
  EXPECT_EQ(d.rejected[1].reason, "no distance");
}

TEST(Remoteness, GdpWeightedDistance) {
  std::vector<Country> cs(3);
  for (int k = 0; k < 3; ++k) cs[k].id = k + 1;
  cs[0].gdp = 1;
  cs[1].gdp = 2;
  cs[2].gdp = 3;
  Matrix d(3, 3);
  d << 0, 10, 20, 10, 0, 30, 20, 30, 0;
  const auto rm = compute_remoteness(CountryTable(cs), d);
  EXPECT_NEAR(rm(0), (2 * 10 + 3 * 20) / 5.0, 1e-12);
  EXPECT_NEAR(rm(1), (1 * 10 + 3 * 30) / 4.0, 1e-12);
  EXPECT_NEAR(rm(2), (1 * 20 + 2 * 30) / 3.0, 1e-12);
  d(0, 1) = d(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(compute_remoteness(CountryTable(cs), d), InvalidArgument);
  EXPECT_NEAR(compute_remoteness(CountryTable(cs), d, true)(0), 20.0, 1e-12);
}

TEST(Selection, DropsIrrelevantBlocks) {
  synthetic::WorldOptions wo;
  wo.countries = 40;
  wo.seed = 2;
  const auto world = synthetic::make_world(wo);
  const auto net = symmetrize(world.flows, SymmetrizeMode::arithmetic);
  const auto design = build_design(world.countries, world.covariates, net.raw_weights());
  const auto [fit, trace] = select_general_to_specific(design, Estimator::ppml, 0.05);
  std::set<std::string> retained(trace.retained.begin(), trace.retained.end());
  EXPECT_TRUE(retained.count("DIST"));
  for (const auto& s : trace.steps) {
    EXPECT_GE(s.p_value, 0.05);
    EXPECT_NE(s.block, "DIST");
  }
  EXPECT_TRUE(fit.diagnostics.converged);
  EXPECT_THROW(select_general_to_specific(design, Estimator::ols_log), InvalidArgument);
}

TEST(Report, ContainsDiagnostics) {
  const auto d = poisson_data(12, 300, 0.5, 0.5, 0.5);
  const auto fit = fit_ppml(raw_design(d.x, d.y));
  std::ostringstream text, kv;
  write_text_report(text, fit);
  write_key_values(kv, fit);
  EXPECT_NE(text.str().find("Wald chi2"), std::string::npos);
  EXPECT_NE(text.str().find("Adj. R2"), std::string::npos);
  EXPECT_NE(kv.str().find("coef.x1="), std::string::npos);
  EXPECT_EQ(stars(0.0001), "***");
  EXPECT_EQ(stars(0.02), "*");
  EXPECT_EQ(stars(0.2), "");
}
