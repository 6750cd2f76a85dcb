#pragma once

// Inverse-l-infinity relaxation
//
//   minimize  trace(C^T Pi) + lambda / ||Pi^T 1||_inf   subject to  Pi 1 = p0, Pi >= 0
//
// split over the column i that attains the maximum. For fixed i the problem is
// min_t g_i(t) + lambda / t, with g_i(t) the parametric transport LP whose i-th
// column sum is pinned to t. g_i is convex piecewise linear, so the sum is
// convex and a golden-section search over t finds its minimum.

#include "omtclust/core.hpp"
#include "omtclust/lp.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omtclust {

struct GoldenSectionResult {
  double argmin = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Minimizes a unimodal f on [lo, hi] to bracket width tol. Both endpoints are
/// evaluated, so boundary minima are returned exactly.
inline GoldenSectionResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                                          double tol) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section: need lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("golden_section: tol must be positive");
  GoldenSectionResult best;
  best.value = std::numeric_limits<double>::infinity();
  auto eval = [&](double t) {
    const double v = f(t);
    if (!std::isfinite(v)) throw std::runtime_error("golden_section: nonfinite value at t = " + std::to_string(t));
    ++best.evaluations;
    if (v < best.value) {
      best.value = v;
      best.argmin = t;
    }
    return v;
  };

  const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  eval(a);
  eval(b);
  double x1 = b - invPhi * (b - a);
  double x2 = a + invPhi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invPhi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invPhi * (b - a);
      f2 = eval(x2);
    }
  }
  return best;
}

struct LinfOptions {
  double searchTol = 1e-5;
  bool warmStart = true;  // reuse the inner basis across t for the same column
  lp::SolverConfig solver;
};

struct LinfResult {
  TransportPlan plan;
  int bestIndex = -1;
  double bestMass = 0.0;
  SolveReport report;
  Eigen::VectorXd perIndexValues;
  Eigen::VectorXd perIndexMass;  // minimizing t per column
};

inline double linf_lower_mass(const ProbabilityVector& p0) {
  return std::max(1e-6, p0.values().maxCoeff() / 10.0);
}

/// The parametric LP g_i(t) for one column, built once; t only moves the rhs.
class InnerTransport {
 public:
  InnerTransport(const CostMatrix& c, const ProbabilityVector& p0, int column, lp::SolverConfig config = {})
      : config_(config), column_(column) {
    if (!c.isSquare()) throw std::invalid_argument("inner_cost: cost matrix must be square");
    n_ = static_cast<int>(c.rows());
    if (static_cast<std::size_t>(n_) != p0.size()) throw std::invalid_argument("inner_cost: size mismatch");
    if (column < 0 || column >= n_) throw std::out_of_range("inner_cost: column index out of range");
    for (int i = 0; i < n_; ++i)
      if (p0[static_cast<std::size_t>(i)] > 0.0) rows_.push_back(i);

    const auto blocks = static_cast<int>(rows_.size());
    lp_.objective.resize(blocks * n_);
    lp_.rhs.resize(blocks + 1);
    lp::SparseRow columnRow;
    for (int a = 0; a < blocks; ++a) {
      const int i = rows_[static_cast<std::size_t>(a)];
      lp::SparseRow row;
      row.reserve(static_cast<std::size_t>(n_));
      for (int j = 0; j < n_; ++j) {
        lp_.objective[a * n_ + j] = c(i, j);
        row.emplace_back(a * n_ + j, 1.0);
      }
      lp_.rows.push_back(std::move(row));
      lp_.rhs[a] = p0[static_cast<std::size_t>(i)];
      columnRow.emplace_back(a * n_ + column, 1.0);
    }
    lp_.rows.push_back(std::move(columnRow));
  }

  /// Solves at column mass t in [0, 1]; throws if the solver does not reach optimality.
  double cost(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("inner_cost: t must lie in [0, 1]");
    lp_.rhs[lp_.rhs.size() - 1] = t;
    auto sol = lp::solve_lp(lp_, config_, basis_);
    if (sol.status != SolveStatus::optimal)
      throw std::runtime_error("inner_cost: column " + std::to_string(column_) + " at t = " + std::to_string(t) +
                               " ended " + to_string(sol.status));
    pivots_ += sol.pivots;
    ++solves_;
    last_ = std::move(sol.primal);
    if (warm_) basis_ = std::move(sol.basis);
    return sol.objectiveValue;
  }

  /// Plan of the most recent solve.
  Eigen::MatrixXd lastPlan() const {
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n_, n_);
    for (std::size_t a = 0; a < rows_.size(); ++a)
      for (int j = 0; j < n_; ++j) pi(rows_[a], j) = std::max(0.0, last_[static_cast<Eigen::Index>(a) * n_ + j]);
    return pi;
  }

  void setWarmStart(bool on) {
    warm_ = on;
    if (!on) basis_.clear();
  }
  std::size_t pivots() const { return pivots_; }
  std::size_t solves() const { return solves_; }

 private:
  lp::LinearProgram lp_;
  lp::SolverConfig config_;
  int column_ = 0;
  int n_ = 0;
  std::vector<int> rows_;
  std::vector<int> basis_;
  Eigen::VectorXd last_;
  bool warm_ = true;
  std::size_t pivots_ = 0;
  std::size_t solves_ = 0;
};

/// g_i(t): cheapest transport with row sums p0 and column i carrying mass t.
inline double inner_cost(const CostMatrix& c, const ProbabilityVector& p0, int i, double t) {
  InnerTransport inner(c, p0, i);
  return inner.cost(t);
}

inline LinfResult solve_linf(const CostMatrix& c, const ProbabilityVector& p0, double lambda,
                             const LinfOptions& opts = {}) {
  if (!c.isSquare()) throw std::invalid_argument("solve_linf: cost matrix must be square");
  if (c.rows() != static_cast<Eigen::Index>(p0.size()))
    throw std::invalid_argument("solve_linf: cost matrix and p0 differ in size");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("solve_linf: lambda must be > 0");

  const int n = static_cast<int>(p0.size());
  const double tMin = linf_lower_mass(p0);
  LinfResult out;
  out.perIndexValues.resize(n);
  out.perIndexMass.resize(n);
  std::size_t pivots = 0;
  std::size_t evaluations = 0;

  for (int i = 0; i < n; ++i) {
    InnerTransport inner(c, p0, i, opts.solver);
    inner.setWarmStart(opts.warmStart);
    double hi = 1.0;
    double lo = tMin;
    GoldenSectionResult g;
    if (lo >= hi || n == 1) {
      g.argmin = hi;
      g.value = inner.cost(hi) + lambda / hi;
    } else {
      g = golden_section([&](double t) { return inner.cost(t) + lambda / t; }, lo, hi, opts.searchTol);
    }
    out.perIndexValues[i] = g.value;
    out.perIndexMass[i] = g.argmin;
    pivots += inner.pivots();
    evaluations += inner.solves();
    if (out.bestIndex < 0 || g.value < out.perIndexValues[out.bestIndex]) out.bestIndex = i;
  }

  InnerTransport witness(c, p0, out.bestIndex, opts.solver);
  witness.setWarmStart(false);
  out.bestMass = out.perIndexMass[out.bestIndex];
  witness.cost(out.bestMass);
  Eigen::MatrixXd pi = witness.lastPlan();
  for (int i = 0; i < n; ++i) {
    const double s = pi.row(i).sum();
    if (s > 0.0) pi.row(i) *= p0[static_cast<std::size_t>(i)] / s;
  }
  out.plan = TransportPlan(pi, p0, std::nullopt, 1e-8);
  out.report.objective = out.perIndexValues[out.bestIndex];
  out.report.iterations = pivots + witness.pivots();
  out.report.status = SolveStatus::optimal;
  out.report.notes.push_back("inner LP solves: " + std::to_string(evaluations + 1));
  return out;
}

}  // namespace omtclust
