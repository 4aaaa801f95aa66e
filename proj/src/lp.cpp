#include "bdloss/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bdloss {

int LpProblem::add_var(double cost, bool nonnegative, std::int64_t key) {
  objective.push_back(cost);
  nonneg.push_back(nonnegative);
  var_key.push_back(key);
  return num_vars++;
}

std::size_t LpProblem::count_rows(RowKind kind) const {
  return std::count_if(rows.begin(), rows.end(), [kind](const LpRow& r) { return r.kind == kind; });
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

// Dense tableau over the equality form. Row i reads
//   sigma_i * (C_i x - s_i) [+ a_i] = sigma_i * q_i >= 0.
class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), t_(std::size_t(rows) * (cols + 1), 0.0),
                                obj_(cols + 1, 0.0), basic_(rows, -1) {}

  double& at(int i, int j) { return t_[std::size_t(i) * (n_ + 1) + j]; }
  double at(int i, int j) const { return t_[std::size_t(i) * (n_ + 1) + j]; }
  double& rhs(int i) { return at(i, n_); }
  double& obj(int j) { return obj_[j]; }
  int& basic(int i) { return basic_[i]; }
  int rows() const { return m_; }
  int cols() const { return n_; }

  void pivot(int r, int e) {
    double* pr = &t_[std::size_t(r) * (n_ + 1)];
    const double inv = 1.0 / pr[e];
    for (int j = 0; j <= n_; ++j) pr[j] *= inv;
    pr[e] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* pi = &t_[std::size_t(i) * (n_ + 1)];
      const double f = pi[e];
      if (f == 0.0) continue;
      for (int j = 0; j <= n_; ++j) pi[j] -= f * pr[j];
      pi[e] = 0.0;
    }
    const double f = obj_[e];
    if (f != 0.0) {
      for (int j = 0; j <= n_; ++j) obj_[j] -= f * pr[j];
      obj_[e] = 0.0;
    }
    basic(r) = e;
  }

  // Reduced costs for cost vector c given the current basis.
  void price(const std::vector<double>& c) {
    for (int j = 0; j < n_; ++j) obj(j) = c[j];
    obj(n_) = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double cb = c[basic_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j <= n_; ++j) obj_[j] -= cb * at(i, j);
    }
  }

 private:
  int m_, n_;
  std::vector<double> t_;
  std::vector<double> obj_;
  std::vector<int> basic_;
};

enum class Outcome { kOptimal, kUnbounded, kLimit };

// Primal simplex with Bland's rule: entering is the eligible column of
// lowest priority rank, leaving breaks ratio ties by lowest rank.
Outcome run_simplex(Tableau& tab, const std::vector<int>& rank, const std::vector<int>& by_rank,
                    const std::vector<bool>& allowed, const SimplexOptions& opts, long& pivots) {
  const int m = tab.rows();
  while (true) {
    int e = -1;
    for (int col : by_rank) {
      if (allowed[col] && tab.obj(col) < -opts.feasibility_tol) {
        e = col;
        break;
      }
    }
    if (e < 0) return Outcome::kOptimal;
    if (pivots >= opts.max_pivots) return Outcome::kLimit;

    int r = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = tab.at(i, e);
      if (a <= opts.pivot_tol) continue;
      const double ratio = std::max(tab.rhs(i), 0.0) / a;
      if (r < 0) {
        best = ratio;
        r = i;
        continue;
      }
      const double slack = 1e-12 * (1.0 + std::abs(best));
      if (ratio < best - slack) {
        best = ratio;
        r = i;
      } else if (ratio <= best + slack && rank[tab.basic(i)] < rank[tab.basic(r)]) {
        best = std::min(best, ratio);
        r = i;
      }
    }
    if (r < 0) return Outcome::kUnbounded;
    tab.pivot(r, e);
    ++pivots;
  }
}

}  // namespace

LpResiduals lp_residuals(const LpProblem& prob, const std::vector<double>& x, const std::vector<double>& y) {
  LpResiduals res;
  const std::size_t n = prob.num_vars;
  std::vector<double> reduced(prob.objective);
  double primal_obj = 0.0, dual_obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    primal_obj += prob.objective[j] * x[j];
    if (prob.nonneg[j]) res.primal_infeasibility = std::max(res.primal_infeasibility, -x[j]);
  }
  for (std::size_t i = 0; i < prob.rows.size(); ++i) {
    const auto& row = prob.rows[i];
    double lhs = 0.0;
    for (const auto& [j, a] : row.coeffs) {
      lhs += a * x[j];
      reduced[j] -= a * y[i];
    }
    const double surplus = lhs - row.rhs;
    res.primal_infeasibility = std::max(res.primal_infeasibility, -surplus);
    res.dual_infeasibility = std::max(res.dual_infeasibility, -y[i]);
    res.complementary_slackness = std::max(res.complementary_slackness, std::abs(y[i] * surplus));
    dual_obj += row.rhs * y[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (prob.nonneg[j]) {
      res.dual_infeasibility = std::max(res.dual_infeasibility, -reduced[j]);
      res.complementary_slackness = std::max(res.complementary_slackness, std::abs(x[j] * reduced[j]));
    } else {
      res.dual_infeasibility = std::max(res.dual_infeasibility, std::abs(reduced[j]));
    }
  }
  res.primal_infeasibility = std::max(res.primal_infeasibility, 0.0);
  res.dual_infeasibility = std::max(res.dual_infeasibility, 0.0);
  res.duality_gap = std::abs(primal_obj - dual_obj);
  return res;
}

LpSolution solve_lp(const LpProblem& prob, const SimplexOptions& opts) {
  const int nv = prob.num_vars;
  const int m = static_cast<int>(prob.rows.size());
  if (static_cast<int>(prob.objective.size()) != nv || static_cast<int>(prob.nonneg.size()) != nv) {
    throw std::invalid_argument("solve_lp: objective/bounds size mismatch");
  }
  for (const auto& row : prob.rows) {
    if (!std::isfinite(row.rhs)) throw std::invalid_argument("solve_lp: non-finite rhs");
    for (const auto& [j, a] : row.coeffs) {
      if (j < 0 || j >= nv || !std::isfinite(a)) throw std::invalid_argument("solve_lp: bad coefficient");
    }
  }

  // Structural columns: one per non-negative variable, a +/- pair per free one.
  std::vector<int> var_rank(nv);
  if (opts.column_order.empty()) {
    std::iota(var_rank.begin(), var_rank.end(), 0);
  } else {
    if (static_cast<int>(opts.column_order.size()) != nv) {
      throw std::invalid_argument("solve_lp: column_order must be a permutation of the variables");
    }
    std::vector<bool> seen(nv, false);
    for (int k = 0; k < nv; ++k) {
      const int v = opts.column_order[k];
      if (v < 0 || v >= nv || seen[v]) {
        throw std::invalid_argument("solve_lp: column_order must be a permutation of the variables");
      }
      seen[v] = true;
      var_rank[v] = k;
    }
  }
  std::vector<int> plus_col(nv), minus_col(nv, -1);
  int ns = 0;
  for (int v = 0; v < nv; ++v) {
    plus_col[v] = ns++;
    if (!prob.nonneg[v]) minus_col[v] = ns++;
  }
  std::vector<bool> needs_art(m);
  int na = 0;
  for (int i = 0; i < m; ++i) {
    needs_art[i] = prob.rows[i].rhs > 0.0;
    na += needs_art[i] ? 1 : 0;
  }
  const int surplus0 = ns, art0 = ns + m, ncols = ns + m + na;

  Tableau tab(m, ncols);
  int next_art = art0;
  for (int i = 0; i < m; ++i) {
    const auto& row = prob.rows[i];
    // Rows with rhs <= 0 are negated so the surplus column starts basic.
    const double sigma = needs_art[i] ? 1.0 : -1.0;
    for (const auto& [v, a] : row.coeffs) {
      tab.at(i, plus_col[v]) += sigma * a;
      if (minus_col[v] >= 0) tab.at(i, minus_col[v]) -= sigma * a;
    }
    tab.at(i, surplus0 + i) = -sigma;
    tab.rhs(i) = sigma * row.rhs;
    if (needs_art[i]) {
      tab.at(i, next_art) = 1.0;
      tab.basic(i) = next_art++;
    } else {
      tab.basic(i) = surplus0 + i;
    }
  }

  // Bland ranks: structural columns by variable priority, then surplus, then artificial.
  std::vector<int> rank(ncols);
  for (int v = 0; v < nv; ++v) {
    const int base = 2 * var_rank[v];
    rank[plus_col[v]] = base;
    if (minus_col[v] >= 0) rank[minus_col[v]] = base + 1;
  }
  for (int c = surplus0; c < ncols; ++c) rank[c] = 2 * nv + (c - surplus0);
  std::vector<int> by_rank(ncols);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::sort(by_rank.begin(), by_rank.end(), [&](int a, int b) { return rank[a] < rank[b]; });

  LpSolution sol;
  long pivots = 0;

  if (na > 0) {
    std::vector<double> c1(ncols, 0.0);
    for (int c = art0; c < ncols; ++c) c1[c] = 1.0;
    tab.price(c1);
    std::vector<bool> allowed(ncols, true);
    const auto out = run_simplex(tab, rank, by_rank, allowed, opts, pivots);
    if (out == Outcome::kLimit) {
      sol.status = LpStatus::kIterationLimit;
      sol.pivots = pivots;
      return sol;
    }
    double scale = 1.0;
    for (const auto& row : prob.rows) scale = std::max(scale, std::abs(row.rhs));
    if (-tab.obj(ncols) > opts.feasibility_tol * scale) {
      sol.status = LpStatus::kInfeasible;
      sol.pivots = pivots;
      return sol;
    }
    // Drive remaining (zero-level) artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basic(i) < art0) continue;
      int best = -1;
      for (int col : by_rank) {
        if (col < art0 && std::abs(tab.at(i, col)) > opts.pivot_tol) {
          best = col;
          break;
        }
      }
      if (best >= 0) {
        tab.pivot(i, best);
        ++pivots;
      }
      // Otherwise the row is redundant and its artificial stays at zero.
    }
  }

  std::vector<double> c2(ncols, 0.0);
  for (int v = 0; v < nv; ++v) {
    c2[plus_col[v]] = prob.objective[v];
    if (minus_col[v] >= 0) c2[minus_col[v]] = -prob.objective[v];
  }
  tab.price(c2);
  std::vector<bool> allowed(ncols, true);
  for (int c = art0; c < ncols; ++c) allowed[c] = false;
  const auto out = run_simplex(tab, rank, by_rank, allowed, opts, pivots);
  sol.pivots = pivots;
  if (out == Outcome::kLimit) {
    sol.status = LpStatus::kIterationLimit;
    return sol;
  }
  if (out == Outcome::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  std::vector<double> col_value(ncols, 0.0);
  for (int i = 0; i < m; ++i) col_value[tab.basic(i)] = tab.rhs(i);
  sol.x.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    double val = col_value[plus_col[v]];
    if (minus_col[v] >= 0) val -= col_value[minus_col[v]];
    sol.x[v] = val;
  }
  // The reduced cost of surplus column s_i equals the row multiplier y_i.
  sol.duals.assign(m, 0.0);
  for (int i = 0; i < m; ++i) sol.duals[i] = tab.obj(surplus0 + i);

  sol.status = LpStatus::kOptimal;
  sol.objective = 0.0;
  for (int v = 0; v < nv; ++v) sol.objective += prob.objective[v] * sol.x[v];
  sol.dual_objective = 0.0;
  for (int i = 0; i < m; ++i) sol.dual_objective += prob.rows[i].rhs * sol.duals[i];
  sol.residuals = lp_residuals(prob, sol.x, sol.duals);
  for (int i = 0; i < m; ++i) {
    double lhs = 0.0;
    for (const auto& [v, a] : prob.rows[i].coeffs) lhs += a * sol.x[v];
    if (std::abs(lhs - prob.rows[i].rhs) <= opts.feasibility_tol) sol.active_rows.push_back(i);
  }
  return sol;
}

}  // namespace bdloss
