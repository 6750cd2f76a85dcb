#pragma once

// Fractional facility-location relaxation of the cardinality penalty:
//
//   minimize  trace(C^T Pi) + lambda * sum_j y_j
//   subject to Pi 1 = p0,  Pi >= 0,  Pi <= p0 y^T,  0 <= y <= 1.
//
// Rows with zero mass carry no variables. By default the N^2 coupling rows
// Pi_ij <= p0_i y_j are generated lazily: solve with a subset, add every
// violated pair, repeat. The final LP solution satisfies all couplings and is
// therefore optimal for the full program.

#include "omtclust/core.hpp"
#include "omtclust/lp.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omtclust {

struct FacilityOptions {
  std::size_t maxPoints = 128;
  bool lazyCoupling = true;
  std::size_t initialNeighbors = 5;  // coupling rows seeded per point (nearest columns, self included)
  double violationTolerance = 1e-9;
  std::size_t maxRounds = 200;
  lp::SolverConfig solver;
};

/// Standard-form facility LP and its column layout. Variables, in order: Pi
/// blocks (one per positive-mass row), y, slacks of y <= 1, one slack per
/// coupling row. Rows: row sums, y <= 1, couplings in insertion order.
struct FacilityProgram {
  lp::LinearProgram lp;
  std::vector<int> activeRows;  // original row index per Pi block
  std::vector<std::pair<int, int>> couplings;  // (block, column) per coupling row
  int pointCount = 0;

  int blockCount() const { return static_cast<int>(activeRows.size()); }
  int planIndex(int block, int column) const { return block * pointCount + column; }
  int openingIndex(int column) const { return blockCount() * pointCount + column; }
  int couplingSlack(std::size_t k) const { return blockCount() * pointCount + 2 * pointCount + static_cast<int>(k); }
  int couplingRow(std::size_t k) const { return blockCount() + pointCount + static_cast<int>(k); }
  const lp::LinearProgram& program() const { return lp; }
};

/// Couplings and final basis of a previous solve on the same (C, p0), reusable
/// as a starting point for another lambda.
struct FacilityWarmStart {
  std::vector<std::pair<int, int>> couplings;
  std::vector<int> basis;
};

struct FacilityResult {
  TransportPlan plan;
  Eigen::VectorXd openings;  // y
  SolveReport report;
  std::size_t couplingRows = 0;
  std::size_t rounds = 0;
};

namespace detail {

inline void check_facility_inputs(const CostMatrix& c, const ProbabilityVector& p0, double lambda,
                                  const FacilityOptions& opts) {
  if (!c.isSquare()) throw std::invalid_argument("facility relaxation: cost matrix must be square");
  if (c.rows() != static_cast<Eigen::Index>(p0.size()))
    throw std::invalid_argument("facility relaxation: cost matrix and p0 differ in size");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("facility relaxation: lambda must be >= 0");
  if (p0.size() > opts.maxPoints)
    throw std::invalid_argument("facility relaxation: N = " + std::to_string(p0.size()) +
                                " exceeds the dense-simplex guard of " + std::to_string(opts.maxPoints));
}

inline std::vector<int> active_rows(const ProbabilityVector& p0) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < p0.size(); ++i)
    if (p0[i] > 0.0) rows.push_back(static_cast<int>(i));
  return rows;
}

inline FacilityProgram build_program(const CostMatrix& c, const ProbabilityVector& p0, double lambda,
                                     std::vector<std::pair<int, int>> couplings) {
  FacilityProgram fp;
  fp.pointCount = static_cast<int>(p0.size());
  fp.activeRows = active_rows(p0);
  fp.couplings = std::move(couplings);
  const int n = fp.pointCount;
  const int blocks = fp.blockCount();
  const auto k = fp.couplings.size();
  const int vars = blocks * n + 2 * n + static_cast<int>(k);

  auto& lp = fp.lp;
  lp.objective = Eigen::VectorXd::Zero(vars);
  lp.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(blocks + n) + static_cast<Eigen::Index>(k));
  lp.rows.reserve(static_cast<std::size_t>(blocks + n) + k);
  for (int a = 0; a < blocks; ++a) {
    const int i = fp.activeRows[static_cast<std::size_t>(a)];
    lp::SparseRow row;
    row.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      lp.objective[fp.planIndex(a, j)] = c(i, j);
      row.emplace_back(fp.planIndex(a, j), 1.0);
    }
    lp.rhs[a] = p0[static_cast<std::size_t>(i)];
    lp.rows.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    lp.objective[fp.openingIndex(j)] = lambda;
    lp.rows.push_back({{fp.openingIndex(j), 1.0}, {fp.openingIndex(j) + n, 1.0}});
    lp.rhs[blocks + j] = 1.0;
  }
  for (std::size_t t = 0; t < k; ++t) {
    const auto [a, j] = fp.couplings[t];
    const double mass = p0[static_cast<std::size_t>(fp.activeRows[static_cast<std::size_t>(a)])];
    lp.rows.push_back({{fp.planIndex(a, j), 1.0}, {fp.openingIndex(j), -mass}, {fp.couplingSlack(t), 1.0}});
  }
  return fp;
}

inline std::vector<std::pair<int, int>> all_couplings(int blocks, int n) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(blocks) * static_cast<std::size_t>(n));
  for (int a = 0; a < blocks; ++a)
    for (int j = 0; j < n; ++j) pairs.emplace_back(a, j);
  return pairs;
}

inline std::vector<std::pair<int, int>> neighbor_couplings(const CostMatrix& c, const std::vector<int>& rows,
                                                           std::size_t neighbors) {
  const int n = static_cast<int>(c.cols());
  const std::size_t k = std::min<std::size_t>(std::max<std::size_t>(neighbors, 1), static_cast<std::size_t>(n));
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int a = 0; a < static_cast<int>(rows.size()); ++a) {
    const int i = rows[static_cast<std::size_t>(a)];
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](int x, int y) { return c(i, x) < c(i, y) || (c(i, x) == c(i, y) && x < y); });
    std::set<int> cols(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    cols.insert(i);
    for (int j : cols) pairs.emplace_back(a, j);
  }
  return pairs;
}

// Re-index a basis after coupling rows (and their slacks) were appended:
// artificial indices shift with the variable count, new rows start on their slacks.
inline std::vector<int> extend_basis(const std::vector<int>& basis, int oldVars, const FacilityProgram& fp,
                                     std::size_t oldCouplings) {
  const int vars = fp.lp.variableCount();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(fp.lp.constraintCount()));
  for (int b : basis) out.push_back(b >= oldVars ? b - oldVars + vars : b);
  for (std::size_t t = oldCouplings; t < fp.couplings.size(); ++t) out.push_back(fp.couplingSlack(t));
  return out;
}

}  // namespace detail

/// The full program with all N^2 coupling rows (restricted to positive-mass rows).
inline FacilityProgram build_facility_lp(const CostMatrix& c, const ProbabilityVector& p0, double lambda,
                                         const FacilityOptions& opts = {}) {
  detail::check_facility_inputs(c, p0, lambda, opts);
  const auto blocks = static_cast<int>(detail::active_rows(p0).size());
  return detail::build_program(c, p0, lambda, detail::all_couplings(blocks, static_cast<int>(p0.size())));
}

inline FacilityResult solve_facility_relaxation(const CostMatrix& c, const ProbabilityVector& p0, double lambda,
                                                const FacilityOptions& opts = {},
                                                FacilityWarmStart* warm = nullptr) {
  detail::check_facility_inputs(c, p0, lambda, opts);
  const int n = static_cast<int>(p0.size());
  const auto rows = detail::active_rows(p0);
  const int blocks = static_cast<int>(rows.size());

  std::vector<std::pair<int, int>> couplings;
  std::vector<int> basis;
  if (!opts.lazyCoupling) {
    couplings = detail::all_couplings(blocks, n);
  } else if (warm != nullptr && !warm->couplings.empty()) {
    couplings = warm->couplings;
    basis = warm->basis;
  } else {
    couplings = detail::neighbor_couplings(c, rows, opts.initialNeighbors);
  }
  std::set<std::pair<int, int>> present(couplings.begin(), couplings.end());
  for (const auto& [a, j] : couplings)
    if (a < 0 || a >= blocks || j < 0 || j >= n)
      throw std::invalid_argument("facility relaxation: warm start does not match the problem");

  FacilityResult out;
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  std::size_t pivots = 0;
  SolveStatus status = SolveStatus::optimal;
  FacilityProgram fp = detail::build_program(c, p0, lambda, couplings);

  for (std::size_t round = 1;; ++round) {
    const auto sol = lp::solve_lp(fp.program(), opts.solver, basis);
    pivots += sol.pivots;
    out.rounds = round;
    out.couplingRows = fp.couplings.size();
    status = sol.status;
    if (status != SolveStatus::optimal) break;
    basis = sol.basis;

    const Eigen::VectorXd& x = sol.primal;
    pi.setZero();
    for (int a = 0; a < blocks; ++a)
      for (int j = 0; j < n; ++j) pi(rows[static_cast<std::size_t>(a)], j) = std::max(0.0, x[fp.planIndex(a, j)]);
    for (int j = 0; j < n; ++j) y[j] = std::clamp(x[fp.openingIndex(j)], 0.0, 1.0);

    const std::size_t before = fp.couplings.size();
    auto grown = fp.couplings;
    for (int a = 0; a < blocks; ++a) {
      const int i = rows[static_cast<std::size_t>(a)];
      for (int j = 0; j < n; ++j)
        if (pi(i, j) - p0[static_cast<std::size_t>(i)] * y[j] > opts.violationTolerance && present.emplace(a, j).second)
          grown.emplace_back(a, j);
    }
    if (grown.size() == before) break;
    if (round >= opts.maxRounds) {
      status = SolveStatus::maxIterations;
      break;
    }
    const int oldVars = fp.lp.variableCount();
    fp = detail::build_program(c, p0, lambda, std::move(grown));
    basis = detail::extend_basis(basis, oldVars, fp, before);
  }

  if (warm != nullptr && status == SolveStatus::optimal && opts.lazyCoupling) {
    warm->couplings = fp.couplings;
    warm->basis = basis;
  }

  if (lambda == 0.0 || status != SolveStatus::optimal) {
    // Tightest openings consistent with the plan.
    for (int j = 0; j < n; ++j) {
      double ratio = 0.0;
      for (int i : rows) ratio = std::max(ratio, pi(i, j) / p0[static_cast<std::size_t>(i)]);
      y[j] = std::min(1.0, ratio);
    }
    if (lambda == 0.0)
      out.report.notes.emplace_back("lambda = 0: optimal openings are not unique; reporting column-sup ratios");
  }

  if (status == SolveStatus::optimal || status == SolveStatus::maxIterations) {
    // Rows are exact up to LP rounding; rebalance each row onto its own mass.
    for (int i : rows) {
      const double s = pi.row(i).sum();
      if (s > 0.0) pi.row(i) *= p0[static_cast<std::size_t>(i)] / s;
    }
    out.plan = TransportPlan(pi, p0, std::nullopt, 1e-8);
  } else {
    Eigen::MatrixXd diag = p0.values().asDiagonal();
    out.plan = TransportPlan(diag, p0);
  }
  out.openings = y;
  out.report.status = status;
  out.report.iterations = pivots;
  out.report.objective = out.plan.cost(c) + lambda * y.sum();
  return out;
}

}  // namespace omtclust
