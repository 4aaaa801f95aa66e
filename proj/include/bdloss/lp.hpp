#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bdloss {

enum class RowKind { kSupermodular, kSubmodular, kNonnegative, kOther };

// One sparse row: sum_k coeffs[k].second * x[coeffs[k].first] >= rhs.
struct LpRow {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;
  RowKind kind = RowKind::kOther;
};

// min r^T x  s.t.  C x >= q, with optional per-variable bounds x_j >= 0.
struct LpProblem {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<LpRow> rows;
  // Variables flagged here carry the bound x_j >= 0; the rest are free.
  std::vector<bool> nonneg;
  // Caller metadata: the subset mask, grid cell or cardinality a variable
  // stands for.
  std::vector<std::int64_t> var_key;

  int add_var(double cost, bool nonnegative, std::int64_t key = -1);
  void add_row(LpRow row) { rows.push_back(std::move(row)); }
  std::size_t count_rows(RowKind kind) const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string to_string(LpStatus s);

// Residuals of the primal/dual pair, recomputed from the problem data.
struct LpResiduals {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double complementary_slackness = 0.0;
  double duality_gap = 0.0;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  // One multiplier y_i >= 0 per row.
  std::vector<double> duals;
  double objective = 0.0;
  double dual_objective = 0.0;
  std::vector<int> active_rows;
  LpResiduals residuals;
  long pivots = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-10;
  double feasibility_tol = 1e-9;
  long max_pivots = 5'000'000;
  // Bland priority of the structural variables: column_order[k] is the
  // variable ranked k-th. Empty means natural order.
  std::vector<int> column_order;
};

// Two-phase dense tableau simplex with Bland's anti-cycling rule.
LpSolution solve_lp(const LpProblem& prob, const SimplexOptions& opts = {});

// Residuals of (x, y) against the problem; also fills active rows.
LpResiduals lp_residuals(const LpProblem& prob, const std::vector<double>& x,
                         const std::vector<double>& y);

}  // namespace bdloss
