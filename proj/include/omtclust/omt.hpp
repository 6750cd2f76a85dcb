#pragma once

#include "omtclust/core.hpp"
#include "omtclust/lp.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace omtclust {

struct TransportSolution {
  TransportPlan plan;
  double cost = 0.0;
  SolveReport report;
};

/// Exact discrete transport: min trace(C^T Pi) over Pi in M(p0, p1).
///
/// Solved as a plain LP (N*M variables, N+M equality rows, one of them
/// redundant). Throws std::runtime_error if the solver stops short of optimal.
inline TransportSolution solve_transport(const ProbabilityVector& p0, const ProbabilityVector& p1,
                                         const CostMatrix& c, const lp::SolverConfig& config = {}) {
  const auto n = static_cast<int>(p0.size());
  const auto m = static_cast<int>(p1.size());
  if (c.rows() != n || c.cols() != m)
    throw std::invalid_argument("solve_transport: cost matrix shape does not match marginals");

  lp::LinearProgram prog;
  prog.objective.resize(n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) prog.objective[i * m + j] = c(i, j);
  prog.rows.resize(static_cast<std::size_t>(n + m));
  prog.rhs.resize(n + m);
  for (int i = 0; i < n; ++i) {
    auto& row = prog.rows[static_cast<std::size_t>(i)];
    row.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) row.emplace_back(i * m + j, 1.0);
    prog.rhs[i] = p0[static_cast<std::size_t>(i)];
  }
  for (int j = 0; j < m; ++j) {
    auto& row = prog.rows[static_cast<std::size_t>(n + j)];
    row.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) row.emplace_back(i * m + j, 1.0);
    prog.rhs[n + j] = p1[static_cast<std::size_t>(j)];
  }

  const auto sol = lp::solve_lp(prog, config);
  if (sol.status != SolveStatus::optimal)
    throw std::runtime_error(std::string("solve_transport: LP stopped with status ") + to_string(sol.status));

  Eigen::MatrixXd pi(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) pi(i, j) = sol.primal[i * m + j];
  TransportSolution out{TransportPlan(std::move(pi), p0, p1), 0.0, {}};
  out.cost = out.plan.cost(c);
  out.report.objective = out.cost;
  out.report.iterations = sol.pivots;
  out.report.status = sol.status;
  return out;
}

struct WassersteinResult {
  double cost = 0.0;    // optimal transport cost under squared Euclidean ground cost
  double metric = 0.0;  // sqrt(cost)
};

inline WassersteinResult wasserstein2(const PointCloud& a, const ProbabilityVector& wa,
                                      const PointCloud& b, const ProbabilityVector& wb) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("wasserstein2: dimension mismatch");
  if (a.size() != wa.size() || b.size() != wb.size())
    throw std::invalid_argument("wasserstein2: weight count differs from point count");
  const auto t = solve_transport(wa, wb, build_cost_matrix(a, b));
  const double cost = std::max(0.0, t.cost);
  return {cost, std::sqrt(cost)};
}

/// Greedy northwest-corner rule. At most N+M-1 nonzero entries.
inline TransportPlan northwest_corner(const ProbabilityVector& p0, const ProbabilityVector& p1) {
  const auto n = static_cast<Eigen::Index>(p0.size());
  const auto m = static_cast<Eigen::Index>(p1.size());
  Eigen::VectorXd supply = p0.values();
  Eigen::VectorXd demand = p1.values();
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, m);
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  while (i < n && j < m) {
    const double amount = std::min(supply[i], demand[j]);
    pi(i, j) += amount;
    supply[i] -= amount;
    demand[j] -= amount;
    if (i == n - 1 && j == m - 1) break;
    if (j == m - 1 || (i < n - 1 && supply[i] <= demand[j])) ++i;
    else ++j;
  }
  // Rounding residue lands in the last cell so that both marginals hold.
  pi(n - 1, m - 1) += std::max(0.0, std::min(supply[n - 1], demand[m - 1]));
  return TransportPlan(std::move(pi), p0, p1);
}

}  // namespace omtclust
