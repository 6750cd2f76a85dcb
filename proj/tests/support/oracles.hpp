#pragma once

// Brute-force reference computations used by the unit and acceptance tests.
// None of them share code with the solvers they check.

#include "omtclust/core.hpp"
#include "omtclust/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

/// Minimum over all permutations sigma of (1/N) sum_i C(i, sigma(i)).
inline double best_matching_cost(const Eigen::MatrixXd& c) {
  const auto n = static_cast<int>(c.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += c(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / n;
}

inline Eigen::MatrixXd dense_matrix(const omtclust::lp::LinearProgram& lp) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(lp.constraintCount(), lp.variableCount());
  for (int r = 0; r < lp.constraintCount(); ++r)
    for (const auto& [j, v] : lp.rows[static_cast<std::size_t>(r)]) a(r, j) += v;
  return a;
}

// Calls fn(x) for every basic solution of {A x = b, x >= 0} with A full row rank.
inline void for_each_basic_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                    const std::function<void(const Eigen::VectorXd&)>& fn, double tol = 1e-10) {
  const auto m = static_cast<int>(a.rows());
  const auto n = static_cast<int>(a.cols());
  if (m > n) return;
  std::vector<char> pick(static_cast<std::size_t>(n), 0);
  std::fill(pick.begin(), pick.begin() + m, 1);
  do {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j)
      if (pick[static_cast<std::size_t>(j)]) cols.push_back(j);
    Eigen::MatrixXd basis(m, m);
    for (int k = 0; k < m; ++k) basis.col(k) = a.col(cols[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.rank() < m) continue;
    const Eigen::VectorXd xb = lu.solve(b);
    if ((xb.array() < -tol).any()) continue;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < m; ++k) x[cols[static_cast<std::size_t>(k)]] = std::max(0.0, xb[k]);
    fn(x);
  } while (std::prev_permutation(pick.begin(), pick.end()));
}

struct LpVerdict {
  omtclust::SolveStatus status = omtclust::SolveStatus::infeasible;
  double value = std::numeric_limits<double>::infinity();
};

/// Exhaustive vertex enumeration. Unboundedness is decided on the normalized
/// recession cone {d >= 0, A d = 0, 1^T d = 1}: the LP is unbounded iff it is
/// feasible and some vertex of that polytope has c^T d < 0.
inline LpVerdict enumerate_lp(const omtclust::lp::LinearProgram& lp) {
  const Eigen::MatrixXd a = dense_matrix(lp);
  LpVerdict v;
  bool feasible = false;
  for_each_basic_feasible(a, lp.rhs, [&](const Eigen::VectorXd& x) {
    feasible = true;
    v.value = std::min(v.value, lp.objective.dot(x));
  });
  if (!feasible) return v;
  Eigen::MatrixXd cone(a.rows() + 1, a.cols());
  cone << a, Eigen::RowVectorXd::Ones(a.cols());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.rows() + 1);
  rhs[a.rows()] = 1.0;
  bool ray = false;
  for_each_basic_feasible(cone, rhs, [&](const Eigen::VectorXd& d) {
    if (lp.objective.dot(d) < -1e-9) ray = true;
  });
  v.status = ray ? omtclust::SolveStatus::unbounded : omtclust::SolveStatus::optimal;
  if (ray) v.value = -std::numeric_limits<double>::infinity();
  return v;
}

/// Projection onto {z >= 0, sum z = r} by multi-resolution grid search: a
/// coarse lattice over the whole simplex, then ever finer lattices around
/// the incumbent down to `resolution`. Exact for convex objectives up to the
/// final step size.
inline Eigen::VectorXd grid_project_simplex(const Eigen::VectorXd& v, double r, double resolution = 1e-4) {
  const auto n = static_cast<int>(v.size());
  if (n == 1 || r == 0.0) return Eigen::VectorXd::Constant(n, n == 1 ? r : 0.0);
  auto dist = [&](const Eigen::VectorXd& z) { return (z - v).squaredNorm(); };
  const int free = n - 1;
  // Lattice points: free coordinates on a grid of `steps` cells inside the box
  // [lo, lo + width], last coordinate from the sum constraint.
  Eigen::VectorXd best = Eigen::VectorXd::Constant(n, r / n);
  double bestDist = dist(best);
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(free);
  double width = r;
  const int steps = 24;
  for (;;) {
    const double h = width / steps;
    std::vector<int> idx(static_cast<std::size_t>(free), 0);
    for (;;) {
      Eigen::VectorXd z(n);
      double sum = 0.0;
      bool ok = true;
      for (int k = 0; k < free; ++k) {
        z[k] = std::min(r, std::max(0.0, lo[k] + h * idx[static_cast<std::size_t>(k)]));
        sum += z[k];
      }
      z[n - 1] = r - sum;
      if (z[n - 1] < -1e-15) ok = false;
      if (ok) {
        z[n - 1] = std::max(0.0, z[n - 1]);
        const double d = dist(z);
        if (d < bestDist) {
          bestDist = d;
          best = z;
        }
      }
      int k = 0;
      while (k < free && ++idx[static_cast<std::size_t>(k)] > steps) idx[static_cast<std::size_t>(k++)] = 0;
      if (k == free) break;
    }
    if (h <= resolution) break;
    width = 6.0 * h;
    for (int k = 0; k < free; ++k) lo[k] = best[k] - 3.0 * h;
  }
  return best;
}

/// g_i(t) in closed form. Every row k ships all of its mass p_k to its cheapest
/// column other than i, then a fractional knapsack moves t units onto column i
/// in increasing order of the extra cost C(k, i) - min_{j != i} C(k, j).
inline double inner_cost_greedy(const Eigen::MatrixXd& c, const Eigen::VectorXd& p, int i, double t) {
  const auto n = static_cast<int>(c.rows());
  if (n == 1) return p[0] * c(0, 0);
  double base = 0.0;
  std::vector<std::pair<double, int>> extra;
  for (int k = 0; k < n; ++k) {
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (j != i) m = std::min(m, c(k, j));
    base += p[k] * m;
    extra.emplace_back(c(k, i) - m, k);
  }
  std::sort(extra.begin(), extra.end());
  double remaining = t;
  for (const auto& [delta, k] : extra) {
    const double a = std::min(remaining, p[k]);
    base += a * delta;
    remaining -= a;
    if (remaining <= 0.0) break;
  }
  return base;
}

/// min over t of g_i(t) + lambda / t on a uniform grid of [lo, 1], extended by
/// the kinks of g_i (cumulative masses in greedy order) that fall inside.
inline double linf_index_grid(const Eigen::MatrixXd& c, const Eigen::VectorXd& p, int i, double lambda, double lo,
                              int points) {
  std::vector<double> ts;
  for (int k = 0; k < points; ++k) ts.push_back(lo + (1.0 - lo) * k / (points - 1));
  const auto n = static_cast<int>(c.rows());
  std::vector<std::pair<double, int>> extra;
  for (int k = 0; k < n; ++k) {
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (j != i) m = std::min(m, c(k, j));
    extra.emplace_back(c(k, i) - m, k);
  }
  std::sort(extra.begin(), extra.end());
  double cumulative = 0.0;
  for (const auto& [delta, k] : extra) {
    cumulative += p[k];
    if (cumulative >= lo && cumulative <= 1.0) ts.push_back(cumulative);
  }
  double best = std::numeric_limits<double>::infinity();
  for (double t : ts) best = std::min(best, inner_cost_greedy(c, p, i, t) + lambda / t);
  return best;
}

/// Adjusted Rand index from raw pair counts (O(N^2), no contingency table).
inline double ari_pairs(const std::vector<int>& a, const std::vector<int>& b) {
  double both = 0, onlyA = 0, onlyB = 0, neither = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa && sb) ++both;
      else if (sa) ++onlyA;
      else if (sb) ++onlyB;
      else ++neither;
    }
  const double den = (both + onlyA) * (onlyA + neither) + (both + onlyB) * (onlyB + neither);
  if (den == 0.0) return 1.0;
  return 2.0 * (both * neither - onlyA * onlyB) / den;
}

/// Sum-of-norms objective minimized over a (k+1)^2 lattice of row-feasible
/// plans for N = 2 (one free entry per row), endpoints included.
inline double son_grid_minimum(const Eigen::Matrix2d& c, const Eigen::Vector2d& p, double lambda, int k = 400) {
  double best = std::numeric_limits<double>::infinity();
  const double scale = lambda / p.norm();
  for (int s = 0; s <= k; ++s)
    for (int u = 0; u <= k; ++u) {
      Eigen::Matrix2d pi;
      pi(0, 0) = p[0] * s / k;
      pi(0, 1) = p[0] - pi(0, 0);
      pi(1, 0) = p[1] * u / k;
      pi(1, 1) = p[1] - pi(1, 0);
      const double v = c.cwiseProduct(pi).sum() + scale * (pi.col(0).norm() + pi.col(1).norm());
      best = std::min(best, v);
    }
  return best;
}

/// argmin_j sum_i p_i C(i, j), lowest index on ties.
inline int medoid(const Eigen::MatrixXd& c, const Eigen::VectorXd& p) {
  int best = 0;
  double bestCost = std::numeric_limits<double>::infinity();
  for (int j = 0; j < c.cols(); ++j) {
    const double v = p.dot(c.col(j));
    if (v < bestCost) {
      bestCost = v;
      best = j;
    }
  }
  return best;
}

/// Random row-feasible plan: each row splits p_i over a random subset of columns.
template <class Rng>
Eigen::MatrixXd random_plan(const Eigen::VectorXd& p, int columns, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(p.size(), columns);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Eigen::VectorXd w(columns);
    for (int j = 0; j < columns; ++j) w[j] = u(rng) < 0.5 ? 0.0 : -std::log(1.0 - u(rng));
    if (w.sum() == 0.0) w[static_cast<Eigen::Index>(u(rng) * columns) % columns] = 1.0;
    pi.row(i) = (p[i] / w.sum()) * w.transpose();
  }
  return pi;
}

}  // namespace oracle
