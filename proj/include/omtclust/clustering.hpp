#pragma once

#include "omtclust/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace omtclust {

struct ClusteringResult {
  std::vector<int> representatives;  // sorted, distinct
  std::vector<int> assignment;       // representative index per point
  std::size_t clusterCount = 0;
  std::vector<int> zeroMassRows;     // rows assigned to themselves for lack of mass
};

/// Point i joins representative argmax_j Pi(i, j); entries within tieTol of
/// the row maximum count as ties and the lowest column wins.
inline ClusteringResult extract_clusters(const Eigen::MatrixXd& plan, double tieTol = 1e-9) {
  if (plan.rows() != plan.cols()) throw std::invalid_argument("extract_clusters: plan must be square");
  if (tieTol < 0.0) throw std::invalid_argument("extract_clusters: negative tie tolerance");
  const auto n = plan.rows();
  ClusteringResult out;
  out.assignment.resize(static_cast<std::size_t>(n));
  std::set<int> reps;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = plan.row(i).maxCoeff();
    int target = static_cast<int>(i);
    if (top <= tieTol) {
      out.zeroMassRows.push_back(static_cast<int>(i));
    } else {
      for (Eigen::Index j = 0; j < n; ++j)
        if (plan(i, j) >= top - tieTol) {
          target = static_cast<int>(j);
          break;
        }
    }
    out.assignment[static_cast<std::size_t>(i)] = target;
    reps.insert(target);
  }
  out.representatives.assign(reps.begin(), reps.end());
  out.clusterCount = out.representatives.size();
  return out;
}

inline ClusteringResult extract_clusters(const TransportPlan& plan, double tieTol = 1e-9) {
  return extract_clusters(plan.matrix(), tieTol);
}

/// Adjusted Rand index by pair counting over the contingency table.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: length mismatch");
  const auto n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };

  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rowTotals;
  std::map<int, double> colTotals;
  for (std::size_t k = 0; k < a.size(); ++k) {
    cells[{a[k], b[k]}] += 1.0;
    rowTotals[a[k]] += 1.0;
    colTotals[b[k]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, count] : cells) index += choose2(count);
  double sumA = 0.0;
  for (const auto& [key, count] : rowTotals) sumA += choose2(count);
  double sumB = 0.0;
  for (const auto& [key, count] : colTotals) sumB += choose2(count);

  const double expected = sumA * sumB / choose2(n);
  const double maximum = 0.5 * (sumA + sumB);
  if (maximum == expected) return 1.0;  // both partitions trivial and identical in structure
  return (index - expected) / (maximum - expected);
}

}  // namespace omtclust
