#pragma once

// Sum-of-norms relaxation of the cardinality-penalized transport problem
//
//   minimize  trace(C^T Pi) + (lambda / ||p0||_2) * sum_j ||Pi_j||_2
//   subject to Pi 1 = p0, Pi >= 0
//
// solved by ADMM on the splitting Pi (row constraints + linear cost) = Z
// (column-group penalty).

#include "omtclust/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace omtclust {

struct AdmmConfig {
  /// Penalty parameter, in units of the problem's natural scale
  /// (largest gradient magnitude over largest row mass).
  double rho = 1.0;
  double epsAbs = 1e-6;
  double epsRel = 1e-4;
  std::size_t maxIterations = 10000;
  bool residualBalancing = true;
  double balancingRatio = 10.0;
  int maxBalancingAdjustments = 10;
  bool recordHistory = false;
  /// Merge whole columns after ADMM while the objective does not increase.
  bool polish = true;

  void validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("AdmmConfig: rho must be positive");
    if (!(epsAbs > 0.0) || !(epsRel > 0.0)) throw std::invalid_argument("AdmmConfig: tolerances must be positive");
    if (maxIterations == 0) throw std::invalid_argument("AdmmConfig: maxIterations must be positive");
  }
};

struct SonResult {
  TransportPlan plan;
  Eigen::MatrixXd auxiliary;  // Z, the column-shrunk iterate
  SolveReport report;
  double lambda = 0.0;
  double finalRho = 0.0;
  std::vector<double> residualHistory;  // primal + dual residual per iteration, if recorded
};

/// Euclidean projection onto {z >= 0, sum z = r} by sort and threshold.
inline Eigen::VectorXd project_scaled_simplex(const Eigen::VectorXd& v, double r) {
  if (r < 0.0) throw std::invalid_argument("project_scaled_simplex: negative radius");
  const auto n = v.size();
  if (n == 0 || r == 0.0) return Eigen::VectorXd::Zero(n);
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += u[static_cast<std::size_t>(k)];
    const double candidate = (cumulative - r) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - candidate > 0.0) threshold = candidate;
  }
  return (v.array() - threshold).cwiseMax(0.0).matrix();
}

/// Proximal operator of kappa * sum_j ||V_j||_2 applied column by column.
inline Eigen::MatrixXd group_shrink(const Eigen::MatrixXd& v, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("group_shrink: negative kappa");
  Eigen::MatrixXd out = v;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double norm = v.col(j).norm();
    const double factor = norm > kappa ? 1.0 - kappa / norm : 0.0;
    out.col(j) *= factor;
  }
  return out;
}

/// Relaxed objective trace(C^T Pi) + lambda/||p0|| * sum_j ||Pi_j||.
inline double son_objective(const CostMatrix& c, const ProbabilityVector& p0, const Eigen::MatrixXd& plan,
                            double lambda) {
  return c.matrix().cwiseProduct(plan).sum() + lambda / p0.norm2() * column_norm_sum(plan);
}

/// Greedy column merging: moves column k into column j when that does not
/// raise the relaxed objective (up to a 1e-12 relative slack, so exact ties
/// collapse too). Row sums are unchanged; the penalty never grows since
/// ||a + b|| <= ||a|| + ||b||. A move into an empty column must lower the
/// objective by more than the slack, which rules out cycling. Ties go to the
/// lowest target column. Returns the merge count.
inline std::size_t merge_columns(const CostMatrix& c, double kappa, Eigen::MatrixXd& plan) {
  const Eigen::Index n = plan.cols();
  const Eigen::MatrixXd& cost = c.matrix();
  std::size_t merges = 0;
  for (;;) {
    Eigen::VectorXd norms = plan.colwise().norm().transpose();
    const double scale = std::max(1.0, std::abs(cost.cwiseProduct(plan).sum()) + kappa * norms.sum());
    const double slack = 1e-12 * scale;
    double bestDelta = slack;
    Eigen::Index from = -1;
    Eigen::Index to = -1;
    for (Eigen::Index k = n - 1; k >= 0; --k) {
      if (norms[k] == 0.0) continue;
      const double costK = cost.col(k).dot(plan.col(k));
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == k) continue;
        const double delta = cost.col(j).dot(plan.col(k)) - costK +
                             kappa * ((plan.col(j) + plan.col(k)).norm() - norms[j] - norms[k]);
        // Relocating into an empty column must strictly pay off.
        if (norms[j] == 0.0 && delta >= -slack) continue;
        if (delta < bestDelta) {
          bestDelta = delta;
          from = k;
          to = j;
        }
      }
    }
    if (from < 0) return merges;
    plan.col(to) += plan.col(from);
    plan.col(from).setZero();
    ++merges;
  }
}

inline SonResult solve_son(const CostMatrix& c, const ProbabilityVector& p0, double lambda,
                           const AdmmConfig& cfg = {}) {
  cfg.validate();
  if (!c.isSquare()) throw std::invalid_argument("solve_son: cost matrix must be square");
  if (c.rows() != static_cast<Eigen::Index>(p0.size()))
    throw std::invalid_argument("solve_son: cost matrix and p0 differ in size");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("solve_son: lambda must be >= 0");

  const Eigen::Index n = c.rows();
  const Eigen::VectorXd& mass = p0.values();
  const double massNorm = p0.norm2();
  const double kappa = lambda / massNorm;
  const double maxMass = mass.maxCoeff();

  // Natural scale of the scaled dual variable: gradient size over plan size.
  const double gradientScale = std::max(c.maxEntry() + kappa * maxMass / massNorm, 1e-12);
  double rho = cfg.rho * gradientScale / maxMass;

  Eigen::MatrixXd pi = mass.asDiagonal();
  Eigen::MatrixXd z = pi;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd zPrev(n, n);
  Eigen::VectorXd row(n);

  SonResult result;
  result.lambda = lambda;
  double bestObjective = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd bestPi = pi;
  int adjustments = 0;
  const double sqrtDim = static_cast<double>(n);  // sqrt of N*N entries
  double primalRes = 0.0;
  double dualRes = 0.0;
  std::size_t iter = 0;
  bool converged = false;

  for (iter = 1; iter <= cfg.maxIterations; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      row = (z.row(i) - u.row(i) - c.matrix().row(i) / rho).transpose();
      pi.row(i) = project_scaled_simplex(row, mass[i]).transpose();
    }
    zPrev = z;
    z = group_shrink(pi + u, kappa / rho);
    u += pi - z;

    primalRes = (pi - z).norm();
    dualRes = rho * (z - zPrev).norm();
    if (!std::isfinite(primalRes) || !std::isfinite(dualRes))
      throw std::runtime_error("solve_son: nonfinite iterate");
    if (cfg.recordHistory) result.residualHistory.push_back(primalRes + dualRes);

    const double objective = son_objective(c, p0, pi, lambda);
    if (objective < bestObjective) {
      bestObjective = objective;
      bestPi = pi;
    }

    const double epsPrimal = cfg.epsAbs * sqrtDim + cfg.epsRel * std::max(pi.norm(), z.norm());
    const double epsDual = cfg.epsAbs * sqrtDim + cfg.epsRel * rho * u.norm();
    if (primalRes <= epsPrimal && dualRes <= epsDual) {
      converged = true;
      break;
    }

    if (cfg.residualBalancing && adjustments < cfg.maxBalancingAdjustments) {
      if (primalRes > cfg.balancingRatio * dualRes) {
        rho *= 2.0;
        u /= 2.0;
        ++adjustments;
      } else if (dualRes > cfg.balancingRatio * primalRes) {
        rho /= 2.0;
        u *= 2.0;
        ++adjustments;
      }
    }
  }

  if (!converged) {
    iter = cfg.maxIterations;
    pi = bestPi;
  }
  result.auxiliary = z;
  result.report.primalResidual = (pi - z).norm();
  if (cfg.polish) {
    const double before = son_objective(c, p0, pi, lambda);
    if (const auto merges = merge_columns(c, kappa, pi); merges > 0)
      result.report.notes.push_back("column merge polish: " + std::to_string(merges) + " merges, objective " +
                                    std::to_string(before) + " -> " + std::to_string(son_objective(c, p0, pi, lambda)));
  }
  result.plan = TransportPlan(pi, p0);
  result.finalRho = rho;
  result.report.iterations = iter;
  result.report.dualResidual = dualRes;
  result.report.objective = son_objective(c, p0, pi, lambda);
  result.report.status = converged ? SolveStatus::optimal : SolveStatus::maxIterations;
  return result;
}

}  // namespace omtclust
