#include <gtest/gtest.h>

#include "designs.hpp"
#include "itn/residual.hpp"

using namespace itn;

namespace {

/// Three countries, fit covering all three pairs with chosen fitted means.
gravity::GravityFit toy_fit(const WeightedNetwork& net, Vector fitted) {
  gravity::GravityFit fit;
  fit.n_countries = 3;
  fit.dyads = {{1, 0}, {2, 0}, {2, 1}};
  fit.response.resize(3);
  fit.residuals.resize(3);
  fit.fitted = fitted;
  for (std::size_t r = 0; r < 3; ++r) {
    const double w = net.raw_weights()(static_cast<Eigen::Index>(fit.dyads[r].i), static_cast<Eigen::Index>(fit.dyads[r].j));
    fit.response(static_cast<Eigen::Index>(r)) = w;
    fit.residuals(static_cast<Eigen::Index>(r)) = w > 0 ? w / fitted(static_cast<Eigen::Index>(r)) : 0.0;
  }
  return fit;
}

WeightedNetwork toy_network() {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = 4;
  w(0, 2) = w(2, 0) = 2;
  return WeightedNetwork::from_raw(w, NetworkKind::original);
}

}  // namespace

TEST(Residual, RatioAndRenormalization) {
  const auto net = toy_network();
  Vector mu(3);
  mu << 8, 1, 3;
  ResidualReport rep;
  const auto e = assemble_residual_network(toy_fit(net, mu), net, ZeroMode::preserve(), &rep);
  // raw residuals: 0.5 and 2 -> renormalized by 2
  EXPECT_EQ(e.kind(), NetworkKind::residual);
  EXPECT_NEAR(e(0, 1), 0.25, 1e-15);
  EXPECT_NEAR(e(0, 2), 1.0, 1e-15);
  EXPECT_EQ(e(1, 2), 0.0);
  EXPECT_NEAR(rep.max_residual, 2.0, 1e-15);
  EXPECT_EQ(rep.positive_links, 2u);
  EXPECT_EQ(rep.unfitted_positive, 0u);
}

TEST(Residual, PreservesBinaryStructure) {
  const auto net = toy_network();
  Vector mu(3);
  mu << 1, 1, 1;
  const auto e = assemble_residual_network(toy_fit(net, mu), net);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(e(i, j) > 0, net(i, j) > 0);
}

TEST(Residual, ZipPrune) {
  const auto net = toy_network();
  Vector mu(3);
  mu << 8, 1, 3;
  auto fit = toy_fit(net, mu);
  EXPECT_THROW(assemble_residual_network(fit, net, ZeroMode::zip_prune(0.5)), InvalidArgument);
  fit.zero_stage.emplace();
  fit.zero_stage->p_zero = Vector(3);
  fit.zero_stage->p_zero << 0.1, 0.9, 0.8;
  ResidualReport rep;
  const auto e = assemble_residual_network(fit, net, ZeroMode::zip_prune(0.5), &rep);
  EXPECT_EQ(rep.pruned, 1u);
  EXPECT_EQ(e(0, 2), 0.0);
  EXPECT_EQ(e(0, 1), 1.0);
  EXPECT_THROW(ZeroMode::zip_prune(1.5), InvalidArgument);
}

TEST(Residual, UnfittedPositiveLinkIsReported) {
  const auto net = toy_network();
  Vector mu(3);
  mu << 8, 1, 3;
  auto fit = toy_fit(net, mu);
  fit.dyads.erase(fit.dyads.begin());
  fit.response = fit.response.tail(2).eval();
  fit.residuals = fit.residuals.tail(2).eval();
  ResidualReport rep;
  const auto e = assemble_residual_network(fit, net, ZeroMode::preserve(), &rep);
  EXPECT_EQ(rep.unfitted_positive, 1u);
  EXPECT_EQ(e(0, 1), 0.0);
}

TEST(Residual, MismatchedInputsAreErrors) {
  const auto net = toy_network();
  Vector mu(3);
  mu << 8, 1, 3;
  auto fit = toy_fit(net, mu);
  fit.n_countries = 4;
  EXPECT_THROW(assemble_residual_network(fit, net), InvalidArgument);
  fit = toy_fit(net, mu);
  fit.response(2) = 1.0;  // network has no link there
  EXPECT_THROW(assemble_residual_network(fit, net), InvalidArgument);
}
