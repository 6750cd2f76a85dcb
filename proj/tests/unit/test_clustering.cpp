#include "omtclust/clustering.hpp"
#include "omtclust/son.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace omtclust;

TEST(ExtractClusters, DiagonalGivesSingletons) {
  const auto p = ProbabilityVector::uniform(5);
  const auto r = extract_clusters(TransportPlan(Eigen::MatrixXd(p.values().asDiagonal()), p));
  EXPECT_EQ(r.clusterCount, 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(r.assignment[static_cast<std::size_t>(i)], i);
}

TEST(ExtractClusters, SingleColumn) {
  const auto p = ProbabilityVector::uniform(5);
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(5, 5);
  pi.col(3) = p.values();
  const auto r = extract_clusters(TransportPlan(pi, p));
  ASSERT_EQ(r.clusterCount, 1u);
  EXPECT_EQ(r.representatives[0], 3);
  for (int a : r.assignment) EXPECT_EQ(a, 3);
}

TEST(ExtractClusters, TiesGoToLowestColumn) {
  Eigen::Matrix3d pi;
  pi << 0.1, 0.1 + 1e-12, 0.1 - 1e-12,  //
      0.0, 0.2, 0.2,                     //
      0.0, 0.0, 0.3;
  const auto r = extract_clusters(pi);
  EXPECT_EQ(r.assignment, (std::vector<int>{0, 1, 2}));
  const auto strict = extract_clusters(pi, 0.0);
  EXPECT_EQ(strict.assignment, (std::vector<int>{1, 1, 2}));
}

TEST(ExtractClusters, ZeroRowsAreSelfAssignedAndFlagged) {
  Eigen::Matrix3d pi;
  pi << 0.5, 0.0, 0.0,  //
      0.0, 0.0, 0.0,    //
      0.5, 0.0, 0.0;
  const auto r = extract_clusters(pi);
  EXPECT_EQ(r.assignment, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(r.zeroMassRows, (std::vector<int>{1}));
  EXPECT_EQ(r.clusterCount, 2u);
}

TEST(ExtractClusters, RejectsBadInput) {
  EXPECT_THROW(extract_clusters(Eigen::MatrixXd::Ones(2, 3)), std::invalid_argument);
  EXPECT_THROW(extract_clusters(Eigen::MatrixXd::Ones(2, 2), -1.0), std::invalid_argument);
}

TEST(ExtractClusters, PlantedPairsViaSon) {
  const PointCloud cloud(std::vector<Eigen::VectorXd>{Eigen::Vector2d(0, 0), Eigen::Vector2d(0.1, 0),
                                                      Eigen::Vector2d(10, 0), Eigen::Vector2d(10.1, 0)},
                         {0, 0, 1, 1});
  const auto c = build_cost_matrix(cloud);
  const auto p = ProbabilityVector::uniform(4);
  // Below about 50 the relaxed optimum splits each pair over two near-parallel columns.
  const double lambda = 60.0;
  const auto son = solve_son(c, p, lambda);
  const auto r = extract_clusters(son.plan);
  EXPECT_EQ(r.clusterCount, 2u);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(r.assignment, cloud.labels()), 1.0);
  // Brute force over the four two-column candidates {0|1} x {2|3}.
  double best = std::numeric_limits<double>::infinity();
  for (int a : {0, 1})
    for (int b : {2, 3}) {
      Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(4, 4);
      pi(0, a) = pi(1, a) = 0.25;
      pi(2, b) = pi(3, b) = 0.25;
      best = std::min(best, son_objective(c, p, pi, lambda));
    }
  EXPECT_LE(son.report.objective, best + 1e-3 * best);
}

TEST(ExtractClusters, InvariantUnderRowRescaling) {
  std::mt19937_64 rng(503);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = ProbabilityVector::uniform(6);
    const Eigen::MatrixXd pi = oracle::random_plan(p.values(), 6, rng);
    Eigen::VectorXd s(6);
    for (int i = 0; i < 6; ++i) s[i] = u(rng);
    const auto a = extract_clusters(pi, 0.0);
    const auto b = extract_clusters(Eigen::MatrixXd(s.asDiagonal() * pi), 0.0);
    EXPECT_EQ(a.assignment, b.assignment);
  }
}

TEST(ExtractClusters, CountBoundedBySupport) {
  std::mt19937_64 rng(509);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = ProbabilityVector::uniform(6);
    const TransportPlan plan(oracle::random_plan(p.values(), 6, rng), p);
    const auto sums = plan.columnSums();
    double minPositive = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < sums.size(); ++j)
      if (sums[j] > 0.0) minPositive = std::min(minPositive, sums[j]);
    const auto r = extract_clusters(plan);
    EXPECT_LE(r.clusterCount, support_cardinality(sums, 0.5 * minPositive));
    for (int a : r.assignment)
      EXPECT_TRUE(std::binary_search(r.representatives.begin(), r.representatives.end(), a));
  }
}

TEST(AdjustedRandIndex, Examples) {
  const std::vector<int> a{0, 0, 1, 1, 2, 2};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, a), 1.0);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, {5, 5, 9, 9, 3, 3}), 1.0);
  const std::vector<int> one(6, 0);
  const std::vector<int> singles{0, 1, 2, 3, 4, 5};
  EXPECT_NEAR(adjusted_rand_index(one, singles), 0.0, 1e-15);
  EXPECT_NEAR(oracle::ari_pairs(one, singles), 0.0, 1e-15);
  EXPECT_THROW(adjusted_rand_index(a, std::vector<int>{0}), std::invalid_argument);
}

TEST(AdjustedRandIndex, MatchesPairCountingOracleRangeAndSymmetry) {
  std::mt19937_64 rng(521);
  std::uniform_int_distribution<int> label(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 15);
    std::vector<int> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = label(rng);
      b[k] = label(rng);
    }
    const double v = adjusted_rand_index(a, b);
    EXPECT_NEAR(v, oracle::ari_pairs(a, b), 1e-12);
    EXPECT_NEAR(v, adjusted_rand_index(b, a), 1e-15);
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}
