#include "omtclust/omt.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace omtclust;

namespace {

PointCloud random_cloud(std::mt19937_64& rng, int n, int d = 2) {
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p(d);
    for (int k = 0; k < d; ++k) p[k] = g(rng);
    pts.push_back(p);
  }
  return PointCloud(pts);
}

}  // namespace

TEST(SolveTransport, SingleRoute) {
  const auto p = ProbabilityVector::uniform(1);
  const auto t = solve_transport(p, p, CostMatrix(Eigen::MatrixXd::Constant(1, 1, 3.5)));
  EXPECT_NEAR(t.plan(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(t.cost, 3.5, 1e-15);
}

TEST(SolveTransport, StayInPlace) {
  const auto p = ProbabilityVector::uniform(2);
  Eigen::Matrix2d c;
  c << 0, 1, 1, 0;
  const auto t = solve_transport(p, p, CostMatrix(c));
  EXPECT_NEAR(t.cost, 0.0, 1e-15);
  EXPECT_NEAR((t.plan.matrix() - 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(SolveTransport, OneFreeParameterInstance) {
  const ProbabilityVector p0(std::vector<double>{0.3, 0.7});
  const ProbabilityVector p1(std::vector<double>{0.6, 0.4});
  Eigen::Matrix2d c;
  c << 1, 2, 3, 1;
  // Independent sweep of the free entry a = Pi(0,0) on a 1e-4 grid.
  double bestCost = std::numeric_limits<double>::infinity();
  double bestA = -1.0;
  for (int k = 0; k <= 3000; ++k) {
    const double a = 1e-4 * k;
    Eigen::Matrix2d pi;
    pi << a, 0.3 - a, 0.6 - a, 0.1 + a;
    const double v = c.cwiseProduct(pi).sum();
    if (v < bestCost) {
      bestCost = v;
      bestA = a;
    }
  }
  const auto t = solve_transport(p0, p1, CostMatrix(c));
  EXPECT_NEAR(t.cost, bestCost, 1e-12);
  EXPECT_NEAR(t.cost, 1.6, 1e-12);
  EXPECT_NEAR(t.plan(0, 0), bestA, 1e-12);
  Eigen::Matrix2d want;
  want << 0.3, 0.0, 0.3, 0.4;
  EXPECT_LE((t.plan.matrix() - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveTransport, ShapeMismatchThrows) {
  const auto p = ProbabilityVector::uniform(2);
  EXPECT_THROW(solve_transport(p, p, CostMatrix(Eigen::MatrixXd::Ones(2, 3))), std::invalid_argument);
}

TEST(SolveTransport, MatchesPermutationBruteForce) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 5;
    const auto a = random_cloud(rng, n);
    const auto b = random_cloud(rng, n);
    const auto c = build_cost_matrix(a, b);
    const auto p = ProbabilityVector::uniform(static_cast<std::size_t>(n));
    const auto t = solve_transport(p, p, c);
    EXPECT_NEAR(t.cost, oracle::best_matching_cost(c.matrix()), 1e-9);
  }
}

TEST(SolveTransport, RectangularMarginalsAreFeasible) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const int m = 1 + trial % 5;
    Eigen::VectorXd w0(n), w1(m);
    for (int i = 0; i < n; ++i) w0[i] = u(rng);
    for (int j = 0; j < m; ++j) w1[j] = u(rng);
    const ProbabilityVector p0(Eigen::VectorXd(w0 / w0.sum()));
    const ProbabilityVector p1(Eigen::VectorXd(w1 / w1.sum()));
    const auto c = build_cost_matrix(random_cloud(rng, n), random_cloud(rng, m));
    const auto t = solve_transport(p0, p1, c);
    EXPECT_LE((t.plan.matrix().rowwise().sum() - p0.values()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((t.plan.columnSums() - p1.values()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(t.cost, northwest_corner(p0, p1).cost(c) + 1e-12);
  }
}

TEST(SolveTransport, InvariantUnderSimultaneousPermutation) {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5;
    Eigen::VectorXd w0(n), w1(n);
    for (int i = 0; i < n; ++i) {
      w0[i] = u(rng);
      w1[i] = u(rng);
    }
    w0 /= w0.sum();
    w1 /= w1.sum();
    const auto c = build_cost_matrix(random_cloud(rng, n), random_cloud(rng, n));
    Eigen::PermutationMatrix<Eigen::Dynamic> pr(n), pc(n);
    pr.setIdentity();
    pc.setIdentity();
    std::shuffle(pr.indices().data(), pr.indices().data() + n, rng);
    std::shuffle(pc.indices().data(), pc.indices().data() + n, rng);
    const double base = solve_transport(ProbabilityVector(w0), ProbabilityVector(w1), c).cost;
    const double permuted = solve_transport(ProbabilityVector(Eigen::VectorXd(pr * w0)),
                                            ProbabilityVector(Eigen::VectorXd(pc * w1)),
                                            CostMatrix(pr * c.matrix() * pc.transpose()))
                                .cost;
    EXPECT_NEAR(base, permuted, 1e-10);
  }
}

TEST(Wasserstein2, IdenticalCloudIsZero) {
  std::mt19937_64 rng(109);
  const auto a = random_cloud(rng, 6);
  const auto w = ProbabilityVector::uniform(6);
  const auto r = wasserstein2(a, w, a, w);
  EXPECT_NEAR(r.cost, 0.0, 1e-12);
  EXPECT_NEAR(r.metric, 0.0, 1e-6);
}

TEST(Wasserstein2, TwoUnitMasses) {
  const PointCloud a(std::vector<Eigen::VectorXd>{Eigen::Vector2d(0, 0)});
  const PointCloud b(std::vector<Eigen::VectorXd>{Eigen::Vector2d(3, 4)});
  const auto w = ProbabilityVector::uniform(1);
  const auto r = wasserstein2(a, w, b, w);
  EXPECT_NEAR(r.cost, 25.0, 1e-12);
  EXPECT_NEAR(r.metric, 5.0, 1e-12);
}

TEST(Wasserstein2, UniformFourByFourEqualsBestMatching) {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_cloud(rng, 4);
    const auto b = random_cloud(rng, 4);
    const auto w = ProbabilityVector::uniform(4);
    EXPECT_NEAR(wasserstein2(a, w, b, w).cost, oracle::best_matching_cost(build_cost_matrix(a, b).matrix()), 1e-9);
  }
}

TEST(Wasserstein2, MetricAxioms) {
  std::mt19937_64 rng(127);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_cloud(rng, 4);
    const auto b = random_cloud(rng, 4);
    const auto c = random_cloud(rng, 4);
    const auto w = ProbabilityVector::uniform(4);
    const double ab = wasserstein2(a, w, b, w).metric;
    const double ba = wasserstein2(b, w, a, w).metric;
    const double bc = wasserstein2(b, w, c, w).metric;
    const double ac = wasserstein2(a, w, c, w).metric;
    EXPECT_NEAR(ab, ba, 1e-9);
    EXPECT_LE(ac, ab + bc + 1e-7);
    EXPECT_GT(ab, 0.0);
  }
}

TEST(Wasserstein2, DimensionMismatchThrows) {
  const PointCloud a(std::vector<Eigen::VectorXd>{Eigen::Vector2d(0, 0)});
  const PointCloud b(std::vector<Eigen::VectorXd>{Eigen::Vector3d(0, 0, 0)});
  const auto w = ProbabilityVector::uniform(1);
  EXPECT_THROW(wasserstein2(a, w, b, w), std::invalid_argument);
}

TEST(NorthwestCorner, Examples) {
  const auto one = ProbabilityVector::uniform(1);
  EXPECT_EQ(northwest_corner(one, one)(0, 0), 1.0);

  const auto half = ProbabilityVector::uniform(2);
  Eigen::Matrix2d diag;
  diag << 0.5, 0.0, 0.0, 0.5;
  EXPECT_LE((northwest_corner(half, half).matrix() - diag).cwiseAbs().maxCoeff(), 1e-15);

  // Hand-executed greedy rule: (0,0) takes 0.3 and exhausts row 0; (1,0)
  // takes the remaining 0.3 of column 0; (1,1) takes 0.4.
  const ProbabilityVector p0(std::vector<double>{0.3, 0.7});
  const ProbabilityVector p1(std::vector<double>{0.6, 0.4});
  Eigen::Matrix2d want;
  want << 0.3, 0.0, 0.3, 0.4;
  EXPECT_LE((northwest_corner(p0, p1).matrix() - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NorthwestCorner, SparseAndFeasibleOnRandomMarginals) {
  std::mt19937_64 rng(131);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 7;
    const int m = 1 + (trial / 7) % 7;
    Eigen::VectorXd w0(n), w1(m);
    for (int i = 0; i < n; ++i) w0[i] = u(rng) < 0.2 ? 0.0 : u(rng);
    for (int j = 0; j < m; ++j) w1[j] = u(rng) < 0.2 ? 0.0 : u(rng);
    if (w0.sum() == 0.0) w0[0] = 1.0;
    if (w1.sum() == 0.0) w1[0] = 1.0;
    const ProbabilityVector p0(Eigen::VectorXd(w0 / w0.sum()));
    const ProbabilityVector p1(Eigen::VectorXd(w1 / w1.sum()));
    const auto plan = northwest_corner(p0, p1);  // constructor checks both marginals
    int nonzero = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) nonzero += plan(i, j) > 0.0 ? 1 : 0;
    EXPECT_LE(nonzero, n + m - 1);
  }
}
