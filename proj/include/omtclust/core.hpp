#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace omtclust {

inline constexpr double kFeasibilityTolerance = 1e-9;

/// Finite set of points in R^d with optional ground-truth cluster labels.
class PointCloud {
 public:
  PointCloud() = default;

  explicit PointCloud(std::vector<Eigen::VectorXd> points,
                      std::vector<int> labels = {})
      : points_(std::move(points)), labels_(std::move(labels)) {
    if (points_.empty()) throw std::invalid_argument("PointCloud: no points");
    const auto d = points_.front().size();
    if (d < 1) throw std::invalid_argument("PointCloud: dimension must be >= 1");
    for (const auto& p : points_) {
      if (p.size() != d)
        throw std::invalid_argument("PointCloud: points differ in dimension");
    }
    if (!labels_.empty() && labels_.size() != points_.size())
      throw std::invalid_argument("PointCloud: label count differs from point count");
  }

  std::size_t size() const { return points_.size(); }
  Eigen::Index dimension() const { return points_.empty() ? 0 : points_.front().size(); }
  const Eigen::VectorXd& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Eigen::VectorXd>& points() const { return points_; }
  bool hasLabels() const { return !labels_.empty(); }
  const std::vector<int>& labels() const { return labels_; }

 private:
  std::vector<Eigen::VectorXd> points_;
  std::vector<int> labels_;
};

/// Nonnegative weights summing to one.
///
/// Entries in [-tol, 0) are clamped to zero. A total within N*tol of one is
/// renormalized; anything further off is rejected.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;

  explicit ProbabilityVector(Eigen::VectorXd weights,
                             double tolerance = kFeasibilityTolerance)
      : weights_(std::move(weights)), tolerance_(tolerance) {
    const auto n = weights_.size();
    if (n == 0) throw std::invalid_argument("ProbabilityVector: empty");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(weights_[i]))
        throw std::invalid_argument("ProbabilityVector: nonfinite weight");
      if (weights_[i] < -tolerance_)
        throw std::invalid_argument("ProbabilityVector: negative weight at index " +
                                    std::to_string(i));
      if (weights_[i] < 0.0) weights_[i] = 0.0;
    }
    const double total = weights_.sum();
    if (std::abs(total - 1.0) > static_cast<double>(n) * tolerance_)
      throw std::invalid_argument("ProbabilityVector: weights sum to " +
                                  std::to_string(total) + ", not 1");
    weights_ /= total;
  }

  explicit ProbabilityVector(const std::vector<double>& weights,
                             double tolerance = kFeasibilityTolerance)
      : ProbabilityVector(Eigen::Map<const Eigen::VectorXd>(
                              weights.data(), static_cast<Eigen::Index>(weights.size())),
                          tolerance) {}

  static ProbabilityVector uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("ProbabilityVector: empty");
    return ProbabilityVector(
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  double operator[](std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& values() const { return weights_; }
  double tolerance() const { return tolerance_; }
  double norm2() const { return weights_.norm(); }

 private:
  Eigen::VectorXd weights_;
  double tolerance_ = kFeasibilityTolerance;
};

/// Ground costs C(i,j) = ||x_i - y_j||^2. Never square-rooted during optimization.
class CostMatrix {
 public:
  CostMatrix() = default;

  explicit CostMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.size() == 0) throw std::invalid_argument("CostMatrix: empty");
    if (!entries_.allFinite()) throw std::invalid_argument("CostMatrix: nonfinite entry");
    if (entries_.minCoeff() < 0.0)
      throw std::invalid_argument("CostMatrix: negative entry");
  }

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  bool isSquare() const { return entries_.rows() == entries_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double maxEntry() const { return entries_.maxCoeff(); }

 private:
  Eigen::MatrixXd entries_;
};

/// Joint distribution Pi with prescribed row sums (and optionally column sums).
///
/// Construction checks membership in M(rowTarget, columnTarget) up to the
/// given per-constraint tolerance and clamps entries in [-tol, 0) to zero.
class TransportPlan {
 public:
  TransportPlan() = default;

  TransportPlan(Eigen::MatrixXd entries, ProbabilityVector rowTarget,
                std::optional<ProbabilityVector> columnTarget = std::nullopt,
                double tolerance = kFeasibilityTolerance)
      : entries_(std::move(entries)),
        rowTarget_(std::move(rowTarget)),
        columnTarget_(std::move(columnTarget)) {
    if (entries_.rows() != static_cast<Eigen::Index>(rowTarget_.size()))
      throw std::invalid_argument("TransportPlan: row count differs from row target");
    if (columnTarget_ && entries_.cols() != static_cast<Eigen::Index>(columnTarget_->size()))
      throw std::invalid_argument("TransportPlan: column count differs from column target");
    if (!entries_.allFinite()) throw std::invalid_argument("TransportPlan: nonfinite entry");
    if (entries_.size() > 0 && entries_.minCoeff() < -tolerance)
      throw std::invalid_argument("TransportPlan: negative entry");
    entries_ = entries_.cwiseMax(0.0);
    const Eigen::VectorXd rows = entries_.rowwise().sum();
    if ((rows - rowTarget_.values()).cwiseAbs().maxCoeff() > tolerance)
      throw std::invalid_argument("TransportPlan: row sums violate the row target");
    if (columnTarget_) {
      const Eigen::VectorXd cols = entries_.colwise().sum().transpose();
      if ((cols - columnTarget_->values()).cwiseAbs().maxCoeff() > tolerance)
        throw std::invalid_argument("TransportPlan: column sums violate the column target");
    }
  }

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  const ProbabilityVector& rowTarget() const { return rowTarget_; }
  const std::optional<ProbabilityVector>& columnTarget() const { return columnTarget_; }

  /// Pi^T 1, the target distribution p1 induced by the plan.
  Eigen::VectorXd columnSums() const { return entries_.colwise().sum().transpose(); }

  /// trace(C^T Pi).
  double cost(const CostMatrix& c) const {
    if (c.rows() != rows() || c.cols() != cols())
      throw std::invalid_argument("TransportPlan::cost: shape mismatch");
    return c.matrix().cwiseProduct(entries_).sum();
  }

 private:
  Eigen::MatrixXd entries_;
  ProbabilityVector rowTarget_;
  std::optional<ProbabilityVector> columnTarget_;
};

enum class SolveStatus { optimal, maxIterations, infeasible, unbounded };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::maxIterations: return "maxIterations";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

struct SolveReport {
  double objective = 0.0;
  std::size_t iterations = 0;
  double primalResidual = 0.0;  // ADMM only
  double dualResidual = 0.0;    // ADMM only
  SolveStatus status = SolveStatus::optimal;
  std::vector<std::string> notes;
};

inline CostMatrix build_cost_matrix(const PointCloud& a, const PointCloud& b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("build_cost_matrix: empty cloud");
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("build_cost_matrix: dimension mismatch");
  const auto n = static_cast<Eigen::Index>(a.size());
  const auto m = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd c(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      c(i, j) = (a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(j)]).squaredNorm();
  return CostMatrix(std::move(c));
}

/// Single-cloud costs. Symmetric with an exactly zero diagonal.
inline CostMatrix build_cost_matrix(const PointCloud& a) {
  if (a.size() == 0) throw std::invalid_argument("build_cost_matrix: empty cloud");
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(j)]).squaredNorm();
      c(i, j) = d;
      c(j, i) = d;
    }
  return CostMatrix(std::move(c));
}

/// Number of entries with |v_i| > threshold. card(Pi^T 1) when fed column sums.
inline std::size_t support_cardinality(const Eigen::VectorXd& v, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("support_cardinality: negative threshold");
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > threshold) ++count;
  return count;
}

/// Relative support threshold applied to solver outputs: 1e-6 * max column sum.
inline double default_support_threshold(const Eigen::VectorXd& columnSums) {
  return columnSums.size() == 0 ? 0.0 : 1e-6 * columnSums.cwiseAbs().maxCoeff();
}

/// Sum of column 2-norms, i.e. the nuclear norm of the block-diagonal lift of Pi.
inline double column_norm_sum(const Eigen::MatrixXd& plan) {
  return plan.colwise().norm().sum();
}

/// Largest column 2-norm, i.e. the spectral norm of the block-diagonal lift.
inline double max_column_norm(const Eigen::MatrixXd& plan) {
  return plan.cols() == 0 ? 0.0 : plan.colwise().norm().maxCoeff();
}

/// Convex envelope of card(Pi^T 1) over row-feasible plans:
/// phi(Pi) = (1/||p0||_2) * sum_i ||Pi_i||_2.
inline double envelope_value(const TransportPlan& plan) {
  const double scale = plan.rowTarget().norm2();
  if (!(scale > 0.0)) throw std::invalid_argument("envelope_value: row target is all zero");
  return column_norm_sum(plan.matrix()) / scale;
}

}  // namespace omtclust
