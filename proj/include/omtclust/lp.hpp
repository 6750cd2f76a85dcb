#pragma once

// Two-phase revised simplex for standard-form linear programs
//
//   minimize c^T x  subject to  A x = b,  x >= 0,  b >= 0.
//
// The basis is held as a factorization (singleton rows and columns peeled,
// dense LU of the remaining kernel) plus a product-form eta file, rebuilt
// every `refactorInterval` pivots. Pricing is Dantzig's rule; after
// 3m consecutive degenerate pivots the solver switches to Bland's rule until
// the next nondegenerate step.

#include "omtclust/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omtclust::lp {

using Term = std::pair<int, double>;  // (column, coefficient)
using SparseRow = std::vector<Term>;

struct LinearProgram {
  Eigen::VectorXd objective;
  std::vector<SparseRow> rows;
  Eigen::VectorXd rhs;

  int variableCount() const { return static_cast<int>(objective.size()); }
  int constraintCount() const { return static_cast<int>(rows.size()); }

  void validate() const {
    if (rhs.size() != constraintCount())
      throw std::invalid_argument("LinearProgram: rhs length differs from row count");
    for (int r = 0; r < constraintCount(); ++r) {
      if (rhs[r] < 0.0) throw std::invalid_argument("LinearProgram: negative rhs in row " + std::to_string(r));
      for (const auto& [col, value] : rows[static_cast<std::size_t>(r)]) {
        if (col < 0 || col >= variableCount())
          throw std::invalid_argument("LinearProgram: column index out of range");
        if (!std::isfinite(value)) throw std::invalid_argument("LinearProgram: nonfinite coefficient");
      }
    }
    if (!objective.allFinite() || !rhs.allFinite())
      throw std::invalid_argument("LinearProgram: nonfinite data");
  }
};

struct LpSolution {
  Eigen::VectorXd primal;
  double objectiveValue = 0.0;
  /// Basic column per row. Indices >= variableCount denote the artificial of
  /// row (index - variableCount), which only stays basic on redundant rows.
  std::vector<int> basis;
  SolveStatus status = SolveStatus::optimal;
  Eigen::VectorXd dual;  // y with A^T y <= c at optimality
  std::size_t pivots = 0;
};

struct SolverConfig {
  std::size_t maxPivots = 0;  // 0 selects 50 * (variables + constraints)
  double pivotTolerance = 1e-9;
  double ratioTolerance = 1e-9;
  double optimalityTolerance = 1e-9;
  double phaseOneTolerance = 1e-7;
  int refactorInterval = 50;
};

// ---------------------------------------------------------------------------
// General form -> standard form

enum class Sense { lessEqual, greaterEqual, equal };

struct Constraint {
  SparseRow terms;
  Sense sense = Sense::lessEqual;
  double rhs = 0.0;
};

struct VariableBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

struct GeneralProgram {
  Eigen::VectorXd objective;
  std::vector<Constraint> constraints;
  std::vector<VariableBounds> bounds;  // empty: every variable in [0, inf)
};

struct StandardForm {
  LinearProgram program;
  int originalVariableCount = 0;
  std::vector<double> shift;  // x_original = x_standard + shift
  double objectiveOffset = 0.0;

  Eigen::VectorXd recover(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(originalVariableCount);
    for (int j = 0; j < originalVariableCount; ++j) out[j] = x[j] + shift[static_cast<std::size_t>(j)];
    return out;
  }
  double originalObjective(double standardObjective) const { return standardObjective + objectiveOffset; }
};

inline StandardForm to_standard_form(const GeneralProgram& gp) {
  const int n0 = static_cast<int>(gp.objective.size());
  if (!gp.bounds.empty() && static_cast<int>(gp.bounds.size()) != n0)
    throw std::invalid_argument("to_standard_form: bounds length differs from variable count");

  StandardForm sf;
  sf.originalVariableCount = n0;
  sf.shift.assign(static_cast<std::size_t>(n0), 0.0);

  std::vector<int> upperBounded;
  for (int j = 0; j < static_cast<int>(gp.bounds.size()); ++j) {
    const auto& b = gp.bounds[static_cast<std::size_t>(j)];
    if (!std::isfinite(b.lower))
      throw std::invalid_argument("to_standard_form: variable " + std::to_string(j) + " needs a finite lower bound");
    if (b.upper < b.lower)
      throw std::invalid_argument("to_standard_form: contradictory bounds on variable " + std::to_string(j));
    sf.shift[static_cast<std::size_t>(j)] = b.lower;
    if (std::isfinite(b.upper)) upperBounded.push_back(j);
  }

  struct PendingRow {
    SparseRow terms;
    double rhs;
    int slackSign;  // +1 slack, -1 surplus, 0 none
  };
  std::vector<PendingRow> pending;
  pending.reserve(gp.constraints.size() + upperBounded.size());

  for (const auto& con : gp.constraints) {
    std::vector<Term> merged = con.terms;
    std::sort(merged.begin(), merged.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    SparseRow row;
    double rhs = con.rhs;
    for (const auto& [col, value] : merged) {
      if (col < 0 || col >= n0) throw std::invalid_argument("to_standard_form: column index out of range");
      rhs -= value * sf.shift[static_cast<std::size_t>(col)];
      if (!row.empty() && row.back().first == col) row.back().second += value;
      else row.emplace_back(col, value);
    }
    std::erase_if(row, [](const Term& t) { return t.second == 0.0; });
    const int sign = con.sense == Sense::lessEqual ? 1 : con.sense == Sense::greaterEqual ? -1 : 0;
    if (row.empty() && sign == 0 && rhs == 0.0) continue;  // 0 = 0
    pending.push_back({std::move(row), rhs, sign});
  }
  for (int j : upperBounded) {
    const auto& b = gp.bounds[static_cast<std::size_t>(j)];
    pending.push_back({SparseRow{{j, 1.0}}, b.upper - b.lower, 1});
  }

  int slackCount = 0;
  for (const auto& p : pending) slackCount += p.slackSign != 0 ? 1 : 0;

  auto& lp = sf.program;
  lp.objective = Eigen::VectorXd::Zero(n0 + slackCount);
  lp.objective.head(n0) = gp.objective;
  sf.objectiveOffset = 0.0;
  for (int j = 0; j < n0; ++j) sf.objectiveOffset += gp.objective[j] * sf.shift[static_cast<std::size_t>(j)];

  lp.rows.reserve(pending.size());
  lp.rhs.resize(static_cast<Eigen::Index>(pending.size()));
  int nextSlack = n0;
  for (std::size_t r = 0; r < pending.size(); ++r) {
    auto& p = pending[r];
    SparseRow row = std::move(p.terms);
    if (p.slackSign != 0) row.emplace_back(nextSlack++, static_cast<double>(p.slackSign));
    double rhs = p.rhs;
    if (rhs < 0.0) {
      for (auto& t : row) t.second = -t.second;
      rhs = -rhs;
    }
    lp.rows.push_back(std::move(row));
    lp.rhs[static_cast<Eigen::Index>(r)] = rhs;
  }
  return sf;
}

// ---------------------------------------------------------------------------
// Revised simplex

// Basis factorization. Row singletons, then column singletons, are peeled
// off iteratively; with rows and columns ordered as
//
//   [ L1  0   0  ]   row-singleton rows
//   [ X   K   0  ]   kernel rows
//   [ Y   Z   L2 ]   column-singleton rows (reverse peel order)
//
// L1 and L2 are triangular and only the kernel K gets a dense LU.
class BasisFactor {
 public:
  // columns[p] lists (row, value) entries of basis column p, rows distinct.
  bool compute(int m, std::vector<SparseRow> columns) {
    m_ = m;
    columns_ = std::move(columns);
    rowPeel_.clear();
    colPeel_.clear();
    const auto sm = static_cast<std::size_t>(m);
    std::vector<SparseRow> rowsOf(sm);
    std::vector<int> rowCount(sm, 0);
    std::vector<int> colCount(sm, 0);
    for (int p = 0; p < m; ++p) {
      auto& col = columns_[static_cast<std::size_t>(p)];
      std::erase_if(col, [](const Term& t) { return t.second == 0.0; });
      for (const auto& [r, v] : col) rowsOf[static_cast<std::size_t>(r)].emplace_back(p, v);
      colCount[static_cast<std::size_t>(p)] = static_cast<int>(col.size());
    }
    for (int r = 0; r < m; ++r) rowCount[static_cast<std::size_t>(r)] = static_cast<int>(rowsOf[static_cast<std::size_t>(r)].size());
    std::vector<char> rowDone(sm, 0);
    std::vector<char> colDone(sm, 0);

    auto removeRow = [&](int r, std::vector<int>* colQueue) {
      rowDone[static_cast<std::size_t>(r)] = 1;
      for (const auto& [p, v] : rowsOf[static_cast<std::size_t>(r)])
        if (!colDone[static_cast<std::size_t>(p)] && --colCount[static_cast<std::size_t>(p)] == 1 && colQueue)
          colQueue->push_back(p);
    };
    auto removeCol = [&](int p, std::vector<int>* rowQueue) {
      colDone[static_cast<std::size_t>(p)] = 1;
      for (const auto& [r, v] : columns_[static_cast<std::size_t>(p)])
        if (!rowDone[static_cast<std::size_t>(r)] && --rowCount[static_cast<std::size_t>(r)] == 1 && rowQueue)
          rowQueue->push_back(r);
    };

    std::vector<int> queue;
    for (int r = 0; r < m; ++r)
      if (rowCount[static_cast<std::size_t>(r)] == 1) queue.push_back(r);
    while (!queue.empty()) {
      const int r = queue.back();
      queue.pop_back();
      if (rowDone[static_cast<std::size_t>(r)] || rowCount[static_cast<std::size_t>(r)] != 1) continue;
      for (const auto& [p, v] : rowsOf[static_cast<std::size_t>(r)]) {
        if (colDone[static_cast<std::size_t>(p)]) continue;
        rowPeel_.push_back({r, p, v});
        removeCol(p, &queue);
        break;
      }
      removeRow(r, nullptr);
    }

    for (int p = 0; p < m; ++p)
      if (!colDone[static_cast<std::size_t>(p)] && colCount[static_cast<std::size_t>(p)] == 1) queue.push_back(p);
    while (!queue.empty()) {
      const int p = queue.back();
      queue.pop_back();
      if (colDone[static_cast<std::size_t>(p)] || colCount[static_cast<std::size_t>(p)] != 1) continue;
      for (const auto& [r, v] : columns_[static_cast<std::size_t>(p)]) {
        if (rowDone[static_cast<std::size_t>(r)]) continue;
        colPeel_.push_back({r, p, v});
        removeRow(r, &queue);
        break;
      }
      removeCol(p, nullptr);
    }

    kernelRows_.clear();
    kernelCols_.clear();
    kernelIndex_.assign(sm, -1);
    for (int r = 0; r < m; ++r)
      if (!rowDone[static_cast<std::size_t>(r)]) {
        kernelIndex_[static_cast<std::size_t>(r)] = static_cast<int>(kernelRows_.size());
        kernelRows_.push_back(r);
      }
    for (int p = 0; p < m; ++p)
      if (!colDone[static_cast<std::size_t>(p)]) kernelCols_.push_back(p);
    singular_ = kernelRows_.size() != kernelCols_.size();
    for (const auto& pv : rowPeel_) singular_ = singular_ || std::abs(pv.value) < 1e-14;
    for (const auto& pv : colPeel_) singular_ = singular_ || std::abs(pv.value) < 1e-14;
    if (singular_) return false;

    const auto k = static_cast<Eigen::Index>(kernelCols_.size());
    if (k > 0) {
      Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(k, k);
      for (Eigen::Index t = 0; t < k; ++t)
        for (const auto& [r, v] : columns_[static_cast<std::size_t>(kernelCols_[static_cast<std::size_t>(t)])]) {
          const int kr = kernelIndex_[static_cast<std::size_t>(r)];
          if (kr >= 0) kernel(kr, t) = v;
        }
      lu_.compute(kernel);
      singular_ = !(lu_.rcond() > 1e-13);
    }
    return !singular_;
  }

  bool singular() const { return singular_; }
  double rcond() const { return kernelCols_.empty() ? 1.0 : lu_.rcond(); }
  std::size_t kernelSize() const { return kernelCols_.size(); }

  // z = B^{-1} a, indexed by basis position.
  Eigen::VectorXd solve(const Eigen::VectorXd& a) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m_);
    Eigen::VectorXd residual = a;
    auto eliminate = [&](int p, double value) {
      z[p] = value;
      if (value != 0.0)
        for (const auto& [r, v] : columns_[static_cast<std::size_t>(p)]) residual[r] -= v * value;
    };
    for (const auto& pv : rowPeel_) eliminate(pv.col, residual[pv.row] / pv.value);
    if (!kernelCols_.empty()) {
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(kernelRows_.size()));
      for (std::size_t t = 0; t < kernelRows_.size(); ++t) rhs[static_cast<Eigen::Index>(t)] = residual[kernelRows_[t]];
      const Eigen::VectorXd zk = lu_.solve(rhs);
      for (std::size_t t = 0; t < kernelCols_.size(); ++t) eliminate(kernelCols_[t], zk[static_cast<Eigen::Index>(t)]);
    }
    for (auto it = colPeel_.rbegin(); it != colPeel_.rend(); ++it) eliminate(it->col, residual[it->row] / it->value);
    return z;
  }

  // w = B^{-T} c, where c is indexed by basis position and w by row.
  Eigen::VectorXd solveTranspose(const Eigen::VectorXd& c) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
    auto columnDot = [&](int p) {
      double s = 0.0;
      for (const auto& [r, v] : columns_[static_cast<std::size_t>(p)]) s += v * w[r];
      return s;
    };
    for (const auto& pv : colPeel_) w[pv.row] = (c[pv.col] - columnDot(pv.col)) / pv.value;
    if (!kernelCols_.empty()) {
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(kernelCols_.size()));
      for (std::size_t t = 0; t < kernelCols_.size(); ++t)
        rhs[static_cast<Eigen::Index>(t)] = c[kernelCols_[t]] - columnDot(kernelCols_[t]);
      // P K = L U, so K^T w = rhs  <=>  U^T L^T (P w) = rhs.
      const auto& packed = lu_.matrixLU();
      Eigen::VectorXd t = packed.triangularView<Eigen::Upper>().transpose().solve(rhs);
      packed.triangularView<Eigen::UnitLower>().transpose().solveInPlace(t);
      const Eigen::VectorXd wk = lu_.permutationP().transpose() * t;
      for (std::size_t i = 0; i < kernelRows_.size(); ++i) w[kernelRows_[i]] = wk[static_cast<Eigen::Index>(i)];
    }
    for (auto it = rowPeel_.rbegin(); it != rowPeel_.rend(); ++it)
      w[it->row] = (c[it->col] - columnDot(it->col)) / it->value;
    return w;
  }

 private:
  struct Pivot {
    int row;
    int col;
    double value;
  };

  int m_ = 0;
  std::vector<SparseRow> columns_;
  std::vector<Pivot> rowPeel_;
  std::vector<Pivot> colPeel_;
  std::vector<int> kernelRows_;
  std::vector<int> kernelCols_;
  std::vector<int> kernelIndex_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  bool singular_ = false;
};

class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, SolverConfig config) : lp_(lp), config_(config) {
    lp_.validate();
    m_ = lp_.constraintCount();
    n_ = lp_.variableCount();
    if (config_.maxPivots == 0) config_.maxPivots = 50u * static_cast<std::size_t>(n_ + m_);
    if (config_.refactorInterval < 1) config_.refactorInterval = 1;
    buildColumns();
  }

  RevisedSimplex(const RevisedSimplex&) = delete;
  RevisedSimplex& operator=(const RevisedSimplex&) = delete;

  LpSolution solve(std::span<const int> startBasis = {}) {
    if (m_ == 0) return solveUnconstrained();

    const WarmStart warm = startBasis.empty() ? WarmStart::rejected : tryWarmStart(startBasis);
    if (warm == WarmStart::dualFeasible) {
      const auto status = runDual();
      if (status != SolveStatus::optimal) return finish(status);
    } else if (warm == WarmStart::rejected) {
      coldStart();
      if (artificialsBasic() > 0) {
        auto status = runPhase(1);
        if (status == SolveStatus::maxIterations) return finish(SolveStatus::maxIterations);
        double infeasibility = 0.0;
        for (int r = 0; r < m_; ++r)
          if (basis_[static_cast<std::size_t>(r)] >= n_) infeasibility += std::max(0.0, xB_[r]);
        if (infeasibility > config_.phaseOneTolerance) return finish(SolveStatus::infeasible);
        driveOutArtificials();
      }
    }
    auto status = runPhase(2);
    return finish(status);
  }

 private:
  struct Eta {
    int row;
    Eigen::VectorXd column;
  };

  void buildColumns() {
    std::vector<int> counts(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& row : lp_.rows)
      for (const auto& t : row) ++counts[static_cast<std::size_t>(t.first) + 1];
    for (int j = 0; j < n_; ++j) counts[static_cast<std::size_t>(j) + 1] += counts[static_cast<std::size_t>(j)];
    colStart_ = counts;
    rowIndex_.resize(static_cast<std::size_t>(colStart_.back()));
    value_.resize(static_cast<std::size_t>(colStart_.back()));
    std::vector<int> fill(colStart_.begin(), colStart_.end() - 1);
    for (int r = 0; r < m_; ++r)
      for (const auto& [col, v] : lp_.rows[static_cast<std::size_t>(r)]) {
        const auto k = static_cast<std::size_t>(fill[static_cast<std::size_t>(col)]++);
        rowIndex_[k] = r;
        value_[k] += v;
      }
  }

  template <class Fn>
  void forColumn(int j, Fn&& fn) const {
    if (j >= n_) {
      fn(j - n_, 1.0);
      return;
    }
    for (int k = colStart_[static_cast<std::size_t>(j)]; k < colStart_[static_cast<std::size_t>(j) + 1]; ++k)
      fn(rowIndex_[static_cast<std::size_t>(k)], value_[static_cast<std::size_t>(k)]);
  }

  double dotColumn(const Eigen::VectorXd& y, int j) const {
    double s = 0.0;
    forColumn(j, [&](int r, double v) { s += y[r] * v; });
    return s;
  }

  Eigen::VectorXd denseColumn(int j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
    forColumn(j, [&](int r, double v) { a[r] += v; });
    return a;
  }

  double cost(int j, int phase) const {
    if (j >= n_) return phase == 1 ? 1.0 : 0.0;
    return phase == 1 ? 0.0 : lp_.objective[j];
  }

  int artificialsBasic() const {
    int k = 0;
    for (int b : basis_) k += b >= n_ ? 1 : 0;
    return k;
  }

  // Slack-like unit columns seed the basis; remaining rows get artificials.
  void coldStart() {
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (int j = 0; j < n_; ++j) {
      const int len = colStart_[static_cast<std::size_t>(j) + 1] - colStart_[static_cast<std::size_t>(j)];
      if (len != 1) continue;
      const auto k = static_cast<std::size_t>(colStart_[static_cast<std::size_t>(j)]);
      const int r = rowIndex_[k];
      if (value_[k] == 1.0 && basis_[static_cast<std::size_t>(r)] < 0) basis_[static_cast<std::size_t>(r)] = j;
    }
    for (int r = 0; r < m_; ++r)
      if (basis_[static_cast<std::size_t>(r)] < 0) basis_[static_cast<std::size_t>(r)] = n_ + r;
    refactor();
  }

  enum class WarmStart { rejected, primalFeasible, dualFeasible };

  // A start basis is usable if it is primal feasible, or dual feasible with
  // every basic artificial at or below zero (the dual simplex drives those out).
  WarmStart tryWarmStart(std::span<const int> start) {
    if (static_cast<int>(start.size()) != m_) return WarmStart::rejected;
    std::vector<char> seen(static_cast<std::size_t>(n_ + m_), 0);
    for (int j : start) {
      if (j < 0 || j >= n_ + m_ || seen[static_cast<std::size_t>(j)]) return WarmStart::rejected;
      seen[static_cast<std::size_t>(j)] = 1;
    }
    basis_.assign(start.begin(), start.end());
    if (!refactor()) return WarmStart::rejected;
    bool primalFeasible = true;
    for (int r = 0; r < m_; ++r) {
      const bool artificial = basis_[static_cast<std::size_t>(r)] >= n_;
      if (artificial && xB_[r] > config_.phaseOneTolerance) return WarmStart::rejected;
      if (xB_[r] < -config_.ratioTolerance) primalFeasible = false;
    }
    if (primalFeasible) return WarmStart::primalFeasible;

    const Eigen::VectorXd y = btran(basicCosts(2));
    for (int j = 0; j < n_; ++j)
      if (!seen[static_cast<std::size_t>(j)] && lp_.objective[j] - dotColumn(y, j) < -config_.optimalityTolerance)
        return WarmStart::rejected;
    return WarmStart::dualFeasible;
  }

  bool refactor() {
    std::vector<SparseRow> columns(static_cast<std::size_t>(m_));
    for (int p = 0; p < m_; ++p) {
      auto& col = columns[static_cast<std::size_t>(p)];
      forColumn(basis_[static_cast<std::size_t>(p)], [&](int i, double v) {
        if (!col.empty() && col.back().first == i) col.back().second += v;
        else col.emplace_back(i, v);
      });
    }
    const bool ok = factor_.compute(m_, std::move(columns));
    etas_.clear();
    if (!ok) return false;
    xB_ = factor_.solve(lp_.rhs);
    return true;
  }

  Eigen::VectorXd ftran(Eigen::VectorXd a) const {
    Eigen::VectorXd w = factor_.solve(a);
    for (const auto& eta : etas_) {
      const double p = w[eta.row] / eta.column[eta.row];
      if (p != 0.0) {
        w -= p * eta.column;
      }
      w[eta.row] = p;
    }
    return w;
  }

  Eigen::VectorXd btran(Eigen::VectorXd v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const auto& a = it->column;
      const double ar = a[it->row];
      const double s = a.dot(v) - ar * v[it->row];
      v[it->row] = (v[it->row] - s) / ar;
    }
    return factor_.solveTranspose(v);
  }

  Eigen::VectorXd basicCosts(int phase) const {
    Eigen::VectorXd cb(m_);
    for (int r = 0; r < m_; ++r) cb[r] = cost(basis_[static_cast<std::size_t>(r)], phase);
    return cb;
  }

  void pivot(int row, int entering, const Eigen::VectorXd& alpha, double step) {
    xB_ -= step * alpha;
    xB_[row] = step;
    basis_[static_cast<std::size_t>(row)] = entering;
    etas_.push_back({row, alpha});
    ++pivots_;
    if (static_cast<int>(etas_.size()) >= config_.refactorInterval) refactor();
  }

  SolveStatus runPhase(int phase) {
    std::vector<char> isBasic(static_cast<std::size_t>(n_ + m_), 0);
    auto markBasis = [&] {
      std::fill(isBasic.begin(), isBasic.end(), 0);
      for (int b : basis_) isBasic[static_cast<std::size_t>(b)] = 1;
    };
    markBasis();
    int degenerateRun = 0;
    bool bland = false;
    bool retriedRay = false;
    const int blandTrigger = 3 * m_;

    for (;;) {
      if (pivots_ >= config_.maxPivots) return SolveStatus::maxIterations;
      const Eigen::VectorXd y = btran(basicCosts(phase));

      int entering = -1;
      double best = -config_.optimalityTolerance;
      for (int j = 0; j < n_; ++j) {
        if (isBasic[static_cast<std::size_t>(j)]) continue;
        const double d = cost(j, phase) - dotColumn(y, j);
        if (d < best) {
          entering = j;
          if (bland) break;
          best = d;
        }
      }
      if (entering < 0) return SolveStatus::optimal;

      const Eigen::VectorXd alpha = ftran(denseColumn(entering));
      const int leave = bland ? ratioTestBland(alpha) : ratioTestHarris(alpha);
      if (leave < 0) {
        // Phase 1 is bounded below, so this is numerical trouble there.
        if (phase == 1) {
          if (retriedRay) return SolveStatus::maxIterations;
          retriedRay = true;
          refactor();
          continue;
        }
        return SolveStatus::unbounded;
      }
      retriedRay = false;
      const double step = std::max(0.0, xB_[leave]) / alpha[leave];
      const bool degenerate = step <= config_.ratioTolerance;
      isBasic[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = 0;
      isBasic[static_cast<std::size_t>(entering)] = 1;
      pivot(leave, entering, alpha, step);

      if (degenerate) {
        if (++degenerateRun > blandTrigger) bland = true;
      } else {
        degenerateRun = 0;
        bland = false;
      }
    }
  }

  // Dual simplex from a dual feasible basis: the most negative basic variable
  // leaves; the entering column keeps reduced costs nonnegative (Harris two-pass).
  // After 3m consecutive dual-degenerate pivots, ties go to the lowest index.
  SolveStatus runDual() {
    std::vector<char> isBasic(static_cast<std::size_t>(n_ + m_), 0);
    for (int b : basis_) isBasic[static_cast<std::size_t>(b)] = 1;
    const int blandTrigger = 3 * m_;
    int degenerateRun = 0;
    int stalls = 0;
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(m_);
    std::vector<double> rowAlpha(static_cast<std::size_t>(n_));
    std::vector<double> reduced(static_cast<std::size_t>(n_));

    for (;;) {
      if (pivots_ >= config_.maxPivots) return SolveStatus::maxIterations;
      const bool bland = degenerateRun > blandTrigger;
      int leave = -1;
      double worst = -config_.ratioTolerance;
      for (int r = 0; r < m_; ++r) {
        if (xB_[r] >= -config_.ratioTolerance) continue;
        if (bland ? (leave < 0 || basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])
                  : xB_[r] < worst) {
          leave = r;
          worst = xB_[r];
        }
      }
      if (leave < 0) return SolveStatus::optimal;

      unit.setZero();
      unit[leave] = 1.0;
      const Eigen::VectorXd rho = btran(unit);
      const Eigen::VectorXd y = btran(basicCosts(2));
      double bound = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n_; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        rowAlpha[sj] = 0.0;
        if (isBasic[sj]) continue;
        rowAlpha[sj] = dotColumn(rho, j);
        if (rowAlpha[sj] >= -config_.pivotTolerance) continue;
        reduced[sj] = std::max(0.0, lp_.objective[j] - dotColumn(y, j));
        bound = std::min(bound, (reduced[sj] + config_.optimalityTolerance) / -rowAlpha[sj]);
      }
      if (!std::isfinite(bound)) return SolveStatus::infeasible;
      int entering = -1;
      double bestPivot = 0.0;
      for (int j = 0; j < n_; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (rowAlpha[sj] >= -config_.pivotTolerance) continue;
        if (reduced[sj] / -rowAlpha[sj] > bound) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (-rowAlpha[sj] > bestPivot) {
          bestPivot = -rowAlpha[sj];
          entering = j;
        }
      }
      const auto se = static_cast<std::size_t>(entering);
      const bool degenerate = reduced[se] / -rowAlpha[se] <= config_.optimalityTolerance;

      const Eigen::VectorXd alpha = ftran(denseColumn(entering));
      if (std::abs(alpha[leave]) <= config_.pivotTolerance) {
        // Row and column disagree on the pivot; refresh the factors once.
        if (++stalls > 1) return SolveStatus::maxIterations;
        refactor();
        continue;
      }
      stalls = 0;
      isBasic[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = 0;
      isBasic[se] = 1;
      pivot(leave, entering, alpha, xB_[leave] / alpha[leave]);
      degenerateRun = degenerate ? degenerateRun + 1 : 0;
    }
  }

  int ratioTestHarris(const Eigen::VectorXd& alpha) const {
    double bound = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m_; ++r)
      if (alpha[r] > config_.pivotTolerance)
        bound = std::min(bound, (std::max(0.0, xB_[r]) + config_.ratioTolerance) / alpha[r]);
    if (!std::isfinite(bound)) return -1;
    int leave = -1;
    double bestPivot = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (alpha[r] <= config_.pivotTolerance) continue;
      if (std::max(0.0, xB_[r]) / alpha[r] <= bound && alpha[r] > bestPivot) {
        bestPivot = alpha[r];
        leave = r;
      }
    }
    return leave;
  }

  int ratioTestBland(const Eigen::VectorXd& alpha) const {
    double bestRatio = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (int r = 0; r < m_; ++r) {
      if (alpha[r] <= config_.pivotTolerance) continue;
      const double ratio = std::max(0.0, xB_[r]) / alpha[r];
      const double slack = 1e-12 * std::max(1.0, std::abs(bestRatio));
      if (leave < 0 || ratio < bestRatio - slack) {
        bestRatio = ratio;
        leave = r;
      } else if (ratio <= bestRatio + slack &&
                 basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)]) {
        leave = r;
      }
    }
    return leave;
  }

  // Replace artificials left basic at zero by structural columns where the
  // row allows it. Artificials on redundant rows stay, pinned at zero.
  void driveOutArtificials() {
    std::vector<char> isBasic(static_cast<std::size_t>(n_ + m_), 0);
    for (int b : basis_) isBasic[static_cast<std::size_t>(b)] = 1;
    for (int r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < n_) continue;
      Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
      e[r] = 1.0;
      const Eigen::VectorXd rowOfInverse = btran(e);
      int best = -1;
      double bestAbs = 1e-7;
      for (int j = 0; j < n_; ++j) {
        if (isBasic[static_cast<std::size_t>(j)]) continue;
        const double a = std::abs(dotColumn(rowOfInverse, j));
        if (a > bestAbs) {
          bestAbs = a;
          best = j;
        }
      }
      if (best < 0) continue;
      const Eigen::VectorXd alpha = ftran(denseColumn(best));
      isBasic[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 0;
      isBasic[static_cast<std::size_t>(best)] = 1;
      pivot(r, best, alpha, xB_[r] / alpha[r]);
    }
    refactor();
  }

  LpSolution solveUnconstrained() const {
    LpSolution s;
    s.primal = Eigen::VectorXd::Zero(n_);
    s.dual = Eigen::VectorXd::Zero(0);
    for (int j = 0; j < n_; ++j)
      if (lp_.objective[j] < -config_.optimalityTolerance) {
        s.status = SolveStatus::unbounded;
        return s;
      }
    s.status = SolveStatus::optimal;
    return s;
  }

  LpSolution finish(SolveStatus status) {
    refactor();
    LpSolution s;
    s.status = status;
    s.pivots = pivots_;
    s.basis = basis_;
    s.primal = Eigen::VectorXd::Zero(n_);
    for (int r = 0; r < m_; ++r) {
      const int b = basis_[static_cast<std::size_t>(r)];
      if (b < n_) s.primal[b] = std::abs(xB_[r]) <= config_.ratioTolerance ? 0.0 : xB_[r];
    }
    s.objectiveValue = lp_.objective.dot(s.primal);
    s.dual = btran(basicCosts(2));
    return s;
  }

  LinearProgram lp_;
  SolverConfig config_;
  int m_ = 0;
  int n_ = 0;
  std::vector<int> colStart_;
  std::vector<int> rowIndex_;
  std::vector<double> value_;
  std::vector<int> basis_;
  Eigen::VectorXd xB_;
  BasisFactor factor_;
  std::vector<Eta> etas_;
  std::size_t pivots_ = 0;
};

inline LpSolution solve_lp(const LinearProgram& lp, const SolverConfig& config = {},
                           std::span<const int> startBasis = {}) {
  RevisedSimplex solver(lp, config);
  return solver.solve(startBasis);
}

}  // namespace omtclust::lp
