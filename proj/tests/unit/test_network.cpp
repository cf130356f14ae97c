#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "itn/network.hpp"
#include "oracles.hpp"

using namespace itn;

namespace {

DirectedFlowMatrix two_country(double a, double b) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = a;
  m(1, 0) = b;
  return DirectedFlowMatrix(m, 2000);
}

Matrix triangle(double a, double b, double c) {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = a;
  w(1, 2) = w(2, 1) = b;
  w(0, 2) = w(2, 0) = c;
  return w;
}

}  // namespace

TEST(Symmetrize, ArithmeticAveragesThenNormalizes) {
  const auto net = symmetrize(two_country(4, 2), SymmetrizeMode::arithmetic);
  EXPECT_DOUBLE_EQ(net.normalizer(), 3.0);
  EXPECT_EQ(net(0, 1), 1.0);
  EXPECT_EQ(net(1, 0), 1.0);
  EXPECT_EQ(net.kind(), NetworkKind::original);
  EXPECT_FALSE(net.degenerate());
}

TEST(Symmetrize, GeometricUsesRootOfProduct) {
  const auto net = symmetrize(two_country(4, 2), SymmetrizeMode::geometric);
  EXPECT_NEAR(net.normalizer(), std::sqrt(8.0), 1e-12);
  EXPECT_EQ(net(0, 1), 1.0);
}

TEST(Symmetrize, SymmetricInputIsRescaledByMax) {
  std::mt19937_64 rng(5);
  Matrix w = oracle::random_weights(rng, 7) * 13.0;
  const auto net = symmetrize(DirectedFlowMatrix(w, 2000), SymmetrizeMode::arithmetic);
  EXPECT_NEAR((net.weights() - w / w.maxCoeff()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Symmetrize, AllZeroIsFlaggedNotDivided) {
  const auto net = symmetrize(DirectedFlowMatrix(Matrix::Zero(4, 4), 2000), SymmetrizeMode::arithmetic);
  EXPECT_TRUE(net.degenerate());
  EXPECT_EQ(net.normalizer(), 0.0);
  EXPECT_EQ(net.weights().maxCoeff(), 0.0);
}

TEST(Symmetrize, InvariantsOnRandomFlows) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix f = Matrix::Zero(9, 9);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        if (i != j && u(rng) < 3.0) f(i, j) = u(rng);
    for (auto mode : {SymmetrizeMode::arithmetic, SymmetrizeMode::geometric}) {
      const auto net = symmetrize(DirectedFlowMatrix(f, 2000), mode);
      const Matrix& w = net.weights();
      EXPECT_EQ((w - w.transpose()).cwiseAbs().maxCoeff(), 0.0);
      EXPECT_EQ(w.diagonal().cwiseAbs().maxCoeff(), 0.0);
      EXPECT_GE(w.minCoeff(), 0.0);
      EXPECT_EQ(w.maxCoeff(), 1.0);
    }
  }
}

TEST(Symmetrize, NormalizationPreservesRatios) {
  Matrix f = Matrix::Zero(3, 3);
  f(0, 1) = f(1, 0) = 6;
  f(1, 2) = f(2, 1) = 2;
  f(0, 2) = f(2, 0) = 3;
  const auto net = symmetrize(DirectedFlowMatrix(f, 2000), SymmetrizeMode::arithmetic);
  EXPECT_NEAR(net(0, 1) / net(1, 2), 3.0, 1e-15);
  EXPECT_NEAR(net(0, 2) / net(1, 2), 1.5, 1e-15);
}

TEST(FlowMatrix, RejectsInvalidEntries) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1;
  EXPECT_THROW(DirectedFlowMatrix(m, 2000), InvalidArgument);
  m(0, 0) = 0;
  m(0, 1) = -1;
  EXPECT_THROW(DirectedFlowMatrix(m, 2000), InvalidArgument);
  m(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(DirectedFlowMatrix(m, 2000), InvalidArgument);
}

TEST(WeightedNetwork, FromNormalizedRequiresPeakOne) {
  EXPECT_THROW(WeightedNetwork::from_normalized(triangle(0.2, 0.5, 0.9), NetworkKind::original, 1.0), InvalidArgument);
  EXPECT_NO_THROW(WeightedNetwork::from_normalized(triangle(0.2, 0.5, 1.0), NetworkKind::original, 1.0));
  Matrix asym = triangle(0.2, 0.5, 1.0);
  asym(0, 1) = 0.3;
  EXPECT_THROW(WeightedNetwork::from_normalized(asym, NetworkKind::original, 1.0), InvalidArgument);
}

TEST(Adjacency, ThresholdCounts) {
  const auto net = WeightedNetwork::from_normalized(triangle(0.2, 0.5, 1.0), NetworkKind::original, 1.0);
  EXPECT_EQ(adjacency(net, 0.0).edge_count(), 3u);
  EXPECT_EQ(adjacency(net, 0.3).edge_count(), 2u);
  EXPECT_THROW(adjacency(net, -0.1), InvalidArgument);
  const auto empty = WeightedNetwork::from_raw(Matrix::Zero(4, 4), NetworkKind::original);
  EXPECT_EQ(adjacency(empty, 0.0).edge_count(), 0u);
}

TEST(Adjacency, BitsMatchDefinition) {
  std::mt19937_64 rng(3);
  const auto net = WeightedNetwork::from_raw(oracle::random_weights(rng, 8), NetworkKind::original);
  for (double thr : {0.0, 0.25, 0.5}) {
    const auto a = adjacency(net, thr);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(a(i, j), i != j && net(i, j) > thr);
  }
}

TEST(Density, CompleteEmptyAndMonotone) {
  const auto full = WeightedNetwork::from_normalized(triangle(0.2, 0.5, 1.0), NetworkKind::original, 1.0);
  EXPECT_EQ(density(full), 1.0);
  const auto empty = WeightedNetwork::from_raw(Matrix::Zero(3, 3), NetworkKind::original);
  EXPECT_EQ(density(empty), 0.0);
  EXPECT_THROW(density(WeightedNetwork::from_raw(Matrix::Zero(1, 1), NetworkKind::original)), InvalidArgument);

  std::mt19937_64 rng(9);
  const auto net = WeightedNetwork::from_raw(oracle::random_weights(rng, 10, 0.5), NetworkKind::original);
  EXPECT_DOUBLE_EQ(density(adjacency(net, 0.0)), static_cast<double>(net.positive_links()) / 45.0);
  double last = 1.0;
  for (double thr = 0.0; thr < 1.0; thr += 0.1) {
    const double d = density(adjacency(net, thr));
    EXPECT_LE(d, last);
    last = d;
  }
}
