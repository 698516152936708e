#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <compare>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "confmot/domain.hpp"

namespace confmot {

/// Dense row-major tracklet x detection cost matrix. Entries are finite
/// non-negative costs or +inf for forbidden pairs.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = kInf)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    CostMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      assert(rows[r].size() == m.cols_);
      for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  /// Replaces every entry above `gate` with +inf.
  void apply_gate(double gate) {
    for (double& v : data_) {
      if (!(v <= gate)) v = kInf;
    }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Costs
// ---------------------------------------------------------------------------

enum class Dims { two, three };

inline double euclidean_cost(double ax, double ay, double az, double bx, double by, double bz, Dims dims) {
  const double dx = ax - bx;
  const double dy = ay - by;
  const double dz = dims == Dims::three ? az - bz : 0.0;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Squared Mahalanobis distance r^T S^-1 r for a 2D residual.
inline double mahalanobis_cost(const Eigen::Vector2d& residual, const Eigen::Matrix2d& innovation_cov) {
  constexpr double kMaxCondition = 1e12;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(0.5 * (innovation_cov + innovation_cov.transpose()));
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !std::isfinite(hi) || hi / lo > kMaxCondition) {
    throw Error(ErrorKind::SingularCovariance, "innovation covariance is not positive definite");
  }
  const Eigen::Vector2d solved = innovation_cov.ldlt().solve(residual);
  return std::max(0.0, residual.dot(solved));
}

// ---------------------------------------------------------------------------
// Greedy
// ---------------------------------------------------------------------------

/// Visits detections by descending score (lower index first on ties); each
/// takes the cheapest still-free tracklet with a finite cost.
inline AssignmentResult greedy_assign(const CostMatrix& costs, std::span<const double> detection_scores) {
  assert(detection_scores.size() == costs.cols());
  std::vector<std::size_t> order(costs.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detection_scores[a] > detection_scores[b];
  });

  AssignmentResult out;
  std::vector<bool> row_taken(costs.rows(), false);
  std::vector<bool> col_taken(costs.cols(), false);
  for (std::size_t col : order) {
    std::size_t best = costs.rows();
    double best_cost = kInf;
    for (std::size_t row = 0; row < costs.rows(); ++row) {
      if (row_taken[row]) continue;
      const double c = costs(row, col);
      if (c < best_cost) {
        best_cost = c;
        best = row;
      }
    }
    if (best < costs.rows()) {
      row_taken[best] = true;
      col_taken[col] = true;
      out.matches.push_back({best, col, best_cost});
    }
  }
  for (std::size_t c = 0; c < costs.cols(); ++c)
    if (!col_taken[c]) out.unmatched_cols.push_back(c);
  for (std::size_t r = 0; r < costs.rows(); ++r)
    if (!row_taken[r]) out.unmatched_rows.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Hungarian (Kuhn-Munkres with potentials, O(n^3))
// ---------------------------------------------------------------------------

template <typename T>
struct AssignmentCostTraits {
  static T zero() { return T{0}; }
  static T infinity() { return std::numeric_limits<T>::infinity(); }
};

/// Lexicographic cost: first the number of slots left without an admissible
/// pair, then the summed finite cost. Forms an ordered group, which is all the
/// potential updates need.
struct LexCost {
  double penalty = 0.0;
  double cost = 0.0;

  friend LexCost operator+(LexCost a, LexCost b) { return {a.penalty + b.penalty, a.cost + b.cost}; }
  friend LexCost operator-(LexCost a, LexCost b) { return {a.penalty - b.penalty, a.cost - b.cost}; }
  LexCost& operator+=(LexCost o) { return *this = *this + o; }
  LexCost& operator-=(LexCost o) { return *this = *this - o; }
  friend bool operator<(LexCost a, LexCost b) {
    if (a.penalty != b.penalty) return a.penalty < b.penalty;
    return a.cost < b.cost;
  }
};

template <>
struct AssignmentCostTraits<LexCost> {
  static LexCost zero() { return {}; }
  static LexCost infinity() { return {std::numeric_limits<double>::infinity(), 0.0}; }
};

/// Solves the square assignment problem of size n. `cost(i, j)` must be
/// callable for i, j in [0, n). Returns the column assigned to each row.
template <typename Cost, typename CostFn>
std::vector<std::size_t> solve_square_assignment(std::size_t n, CostFn&& cost) {
  using Traits = AssignmentCostTraits<Cost>;
  // 1-based potentials; index 0 is the virtual root column.
  std::vector<Cost> u(n + 1, Traits::zero()), v(n + 1, Traits::zero());
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<Cost> minv(n + 1);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), Traits::infinity());
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      Cost delta = Traits::infinity();
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Cost cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

/// Maximum-cardinality assignment over finite entries, minimum total cost
/// among those. Infinite (gated) entries are never matched.
inline AssignmentResult hungarian_assign(const CostMatrix& costs) {
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  const std::size_t n = std::max(rows, cols);

  AssignmentResult out;
  std::vector<bool> row_taken(rows, false);
  std::vector<bool> col_taken(cols, false);

  if (rows > 0 && cols > 0) {
    auto lex = [&](std::size_t i, std::size_t j) -> LexCost {
      if (i >= rows || j >= cols) return {1.0, 0.0};
      const double c = costs(i, j);
      if (!std::isfinite(c)) return {1.0, 0.0};
      return {0.0, c};
    };
    const auto row_to_col = solve_square_assignment<LexCost>(n, lex);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t c = row_to_col[r];
      if (c >= cols || !std::isfinite(costs(r, c))) continue;
      row_taken[r] = true;
      col_taken[c] = true;
      out.matches.push_back({r, c, costs(r, c)});
    }
  }
  for (std::size_t c = 0; c < cols; ++c)
    if (!col_taken[c]) out.unmatched_cols.push_back(c);
  for (std::size_t r = 0; r < rows; ++r)
    if (!row_taken[r]) out.unmatched_rows.push_back(r);
  return out;
}

inline AssignmentResult assign(Matcher matcher, const CostMatrix& costs, std::span<const double> detection_scores) {
  return matcher == Matcher::greedy ? greedy_assign(costs, detection_scores) : hungarian_assign(costs);
}

inline double total_cost(const AssignmentResult& r) {
  double sum = 0.0;
  for (const auto& m : r.matches) sum += m.cost;
  return sum;
}

}  // namespace confmot
