#include <gtest/gtest.h>

#include <random>
#include <set>

#include "itn/mst.hpp"
#include "oracles.hpp"

using namespace itn;

TEST(Mantegna, Examples) {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1.0;
  const Matrix d = mantegna_distance(w);
  EXPECT_EQ(d(0, 1), 0.0);
  EXPECT_NEAR(d(0, 2), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(d(1, 1), 0.0);
  w(0, 1) = w(1, 0) = 0.5;
  EXPECT_NEAR(mantegna_distance(w)(0, 1), 1.0, 1e-15);
}

TEST(Mantegna, MatchesFormulaAndIsDecreasing) {
  std::mt19937_64 rng(2);
  const Matrix w = oracle::random_weights(rng, 9, 0.8);
  const Matrix d = mantegna_distance(w);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      EXPECT_NEAR(d(i, j), std::sqrt(2.0 * (1.0 - w(i, j))) * (i != j), 1e-14);
      EXPECT_EQ(d(i, j), d(j, i));
      for (int k = 0; k < 9; ++k)
        if (i != j && i != k && w(i, j) < w(i, k)) EXPECT_GT(d(i, j), d(i, k));
    }
}

TEST(Kruskal, TriangleKeepsTwoShortest) {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 1) = d(1, 0) = 1;
  d(1, 2) = d(2, 1) = 2;
  d(0, 2) = d(2, 0) = 3;
  const auto t = kruskal_mst(d);
  ASSERT_EQ(t.edges.size(), 2u);
  EXPECT_DOUBLE_EQ(t.total_distance, 3.0);
  EXPECT_EQ(t.edges[0].i, 0u);
  EXPECT_EQ(t.edges[0].j, 1u);
  EXPECT_DOUBLE_EQ(t.edges[1].scaled_distance, 1.0);
  EXPECT_DOUBLE_EQ(t.edges[1].report_weight, 0.0);
  EXPECT_DOUBLE_EQ(t.edges[0].report_weight, 0.5);
}

TEST(Kruskal, TiesAreDeterministic) {
  Matrix d = Matrix::Constant(4, 4, 1.0);
  d.diagonal().setZero();
  const auto a = kruskal_mst(d);
  const auto b = kruskal_mst(d);
  ASSERT_EQ(a.edges.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a.edges[k].i, 0u);
    EXPECT_EQ(a.edges[k].j, k + 1);
    EXPECT_EQ(a.edges[k].i, b.edges[k].i);
    EXPECT_EQ(a.edges[k].j, b.edges[k].j);
  }
}

TEST(Kruskal, RejectsBadInput) {
  EXPECT_THROW(kruskal_mst(Matrix::Zero(1, 1)), InvalidArgument);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 1) = d(1, 0) = -1;
  EXPECT_THROW(kruskal_mst(d), InvalidArgument);
}

TEST(Kruskal, MatchesBruteForce) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 3 + rep % 5;
    const Matrix w = oracle::random_weights(rng, n, 0.9);
    const Matrix d = mantegna_distance(w);
    const auto t = kruskal_mst(d);
    EXPECT_EQ(t.edges.size(), static_cast<std::size_t>(n - 1));
    EXPECT_NEAR(t.total_distance, oracle::brute_force_mst(d), 1e-12);
  }
}

TEST(Kruskal, TreeProperties) {
  std::mt19937_64 rng(41);
  const Matrix w = oracle::random_weights(rng, 25, 0.5);
  const auto t = kruskal_mst(mantegna_distance(w));
  // connected and acyclic: n-1 edges spanning one component
  EXPECT_EQ(t.edges.size(), 24u);
  EXPECT_EQ(t.component_count, 1u);
  Matrix support = Matrix::Zero(25, 25);
  for (const auto& e : t.edges) support(e.i, e.j) = support(e.j, e.i) = 1;
  EXPECT_EQ(oracle::largest_component(support).size(), 25u);
  for (const auto& e : t.edges) {
    EXPECT_LT(e.i, e.j);
    EXPECT_GE(e.report_weight, 0.0);
    EXPECT_LE(e.report_weight, 1.0);
  }
}

TEST(Kruskal, PositiveLinksUniverseGivesForest) {
  Matrix w = Matrix::Zero(5, 5);
  w(0, 1) = w(1, 0) = 1.0;
  w(1, 2) = w(2, 1) = 0.5;
  w(3, 4) = w(4, 3) = 0.25;
  const Matrix d = mantegna_distance(w);
  const auto forest = kruskal_mst(d, EdgeUniverse::positive_links);
  EXPECT_EQ(forest.edges.size(), 3u);
  EXPECT_EQ(forest.component_count, 2u);
  const auto full = kruskal_mst(d, EdgeUniverse::all_pairs);
  EXPECT_EQ(full.edges.size(), 4u);
  EXPECT_EQ(full.component_count, 1u);
}
