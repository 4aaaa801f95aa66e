#include "bdloss/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bdloss {
namespace {

constexpr double kAdditivityTol = 1e-8;
constexpr double kCertificateTol = 1e-9;
constexpr double kGapTol = 1e-8;
constexpr double kMaxSymmetricWeight = 1e12;

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}

// Sparse row builder that drops the fixed g(empty) = 0 term.
struct RowBuilder {
  LpRow row;
  template <typename VarOf>
  void add(std::int64_t cell, double a, VarOf var_of) {
    const int v = var_of(cell);
    if (v < 0) return;
    for (auto& [idx, coef] : row.coeffs) {
      if (idx == v) {
        coef += a;
        return;
      }
    }
    row.coeffs.emplace_back(v, a);
  }
};

// Adds the supermodular row e >= 0 and the submodular-remainder row
// e >= -kappa, where e = g(lo) + g(hi) - g(mid1) - g(mid2) and kappa is the
// same combination of l with opposite sign.
template <typename VarOf>
void add_exchange_pair(LpProblem& lp, std::int64_t lo, std::int64_t mid1, std::int64_t mid2, std::int64_t hi,
                       double kappa, VarOf var_of) {
  RowBuilder b;
  b.add(lo, 1.0, var_of);
  b.add(hi, 1.0, var_of);
  b.add(mid1, -1.0, var_of);
  b.add(mid2, -1.0, var_of);
  LpRow super = b.row;
  super.rhs = 0.0;
  super.kind = RowKind::kSupermodular;
  LpRow sub = b.row;
  sub.rhs = -kappa;
  sub.kind = RowKind::kSubmodular;
  lp.add_row(std::move(super));
  lp.add_row(std::move(sub));
}

std::vector<double> symmetric_profile_of(const SetFunction& l, double tol) {
  if (l.repr() == Repr::kSymmetric) return l.profile();
  const int p = l.size();
  const auto t = l.materialize();
  std::vector<double> c(static_cast<std::size_t>(p) + 1, 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(p) + 1, false);
  for (std::uint64_t a = 0; a < t.size(); ++a) {
    const int k = popcount(a);
    if (!seen[k]) {
      c[k] = t[a];
      seen[k] = true;
    } else if (std::abs(c[k] - t[a]) > tol) {
      throw std::invalid_argument("decompose: symmetric method requested for a non-symmetric set function");
    }
  }
  return c;
}

// Representative subset for an LP variable key, used to read a candidate g.
Subset representative(const SetFunction& l, DecompMethod method, std::int64_t key) {
  const int p = l.size();
  Subset s(p);
  if (method == DecompMethod::kFull) {
    return Subset::from_mask(p, static_cast<std::uint64_t>(key));
  }
  if (method == DecompMethod::kSymmetric) {
    for (int i = 0; i < key; ++i) s.set(i);
    return s;
  }
  const auto& g = l.grid();
  const int a = static_cast<int>(key / g.cols());
  const int b = static_cast<int>(key % g.cols());
  const auto& pos = l.positives();
  int na = 0, nb = 0;
  for (int i = 0; i < p; ++i) {
    if (pos.test(i) && na < a) {
      s.set(i);
      ++na;
    } else if (!pos.test(i) && nb < b) {
      s.set(i);
      ++nb;
    }
  }
  return s;
}

}  // namespace

std::string to_string(DecompMethod m) {
  switch (m) {
    case DecompMethod::kAuto: return "auto";
    case DecompMethod::kFull: return "full";
    case DecompMethod::kSymmetric: return "symmetric";
    case DecompMethod::kFpFn: return "fpfn";
  }
  return "unknown";
}

DecompMethod parse_decomp_method(const std::string& s) {
  if (s == "auto") return DecompMethod::kAuto;
  if (s == "full") return DecompMethod::kFull;
  if (s == "symmetric") return DecompMethod::kSymmetric;
  if (s == "fpfn") return DecompMethod::kFpFn;
  throw std::invalid_argument("unknown decomposition method '" + s + "'");
}

LpProblem build_full_lp(const SetFunction& l, int cap) {
  const int p = l.size();
  if (p > cap) {
    throw std::invalid_argument("build_full_lp: p = " + std::to_string(p) + " exceeds full-LP cap " +
                                std::to_string(cap) + "; use a symmetric or fpfn representation");
  }
  const auto t = l.materialize(std::max(cap, p));
  const std::uint64_t n = t.size();
  LpProblem lp;
  for (std::uint64_t a = 1; a < n; ++a) lp.add_var(1.0, true, static_cast<std::int64_t>(a));
  auto var_of = [](std::int64_t mask) { return static_cast<int>(mask) - 1; };

  for (std::uint64_t a = 0; a < n; ++a) {
    for (int i = 0; i < p; ++i) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      if (a & bi) continue;
      for (int j = i + 1; j < p; ++j) {
        const std::uint64_t bj = std::uint64_t{1} << j;
        if (a & bj) continue;
        const double kappa = t[a | bi] + t[a | bj] - t[a] - t[a | bi | bj];
        add_exchange_pair(lp, static_cast<std::int64_t>(a), static_cast<std::int64_t>(a | bi),
                          static_cast<std::int64_t>(a | bj), static_cast<std::int64_t>(a | bi | bj), kappa, var_of);
      }
    }
  }
  for (int j = 0; j < p; ++j) {
    LpRow r;
    r.coeffs.emplace_back(var_of(std::int64_t{1} << j), 1.0);
    r.kind = RowKind::kNonnegative;
    lp.add_row(std::move(r));
  }
  return lp;
}

LpProblem build_symmetric_lp(std::span<const double> c) {
  if (c.size() < 2) throw std::invalid_argument("build_symmetric_lp: profile needs p >= 1");
  if (c[0] != 0.0) throw std::invalid_argument("build_symmetric_lp: c[0] must be 0");
  const int p = static_cast<int>(c.size()) - 1;
  // Every c_g[k] is a non-negative combination of c_g[1] and the second
  // differences, so the feasible set has a pointwise least element and any
  // positive weights select it. Past ~1e12 the binomial weights swamp the
  // reduced costs, so large p falls back to unit weights.
  const bool unit = binom(p, p / 2) > kMaxSymmetricWeight;
  LpProblem lp;
  for (int k = 1; k <= p; ++k) lp.add_var(unit ? 1.0 : binom(p, k), true, k);
  auto var_of = [](std::int64_t k) { return static_cast<int>(k) - 1; };
  for (int k = 1; k < p; ++k) {
    // Cardinality analogue of the local exchange: two elements added to a
    // set of size k - 1.
    const double kappa = 2.0 * c[k] - c[k - 1] - c[k + 1];
    RowBuilder b;
    b.add(k - 1, 1.0, var_of);
    b.add(k + 1, 1.0, var_of);
    b.add(k, -2.0, var_of);
    LpRow super = b.row;
    super.kind = RowKind::kSupermodular;
    LpRow sub = b.row;
    sub.rhs = -kappa;
    sub.kind = RowKind::kSubmodular;
    lp.add_row(std::move(super));
    lp.add_row(std::move(sub));
  }
  LpRow nn;
  nn.coeffs.emplace_back(0, 1.0);
  nn.kind = RowKind::kNonnegative;
  lp.add_row(std::move(nn));
  return lp;
}

LpProblem build_fpfn_lp(const FpFnGrid& c) {
  if (c.values.size() != std::size_t(c.rows()) * c.cols()) {
    throw std::invalid_argument("build_fpfn_lp: grid dimension mismatch");
  }
  if (c.at(0, 0) != 0.0) throw std::invalid_argument("build_fpfn_lp: c(0,0) must be 0");
  const int m = c.m, q = c.p_neg, cols = c.cols();
  LpProblem lp;
  std::vector<int> index(c.values.size(), -1);
  for (int a = 0; a <= m; ++a) {
    for (int b = 0; b <= q; ++b) {
      if (a == 0 && b == 0) continue;
      index[a * cols + b] = lp.add_var(binom(m, a) * binom(q, b), true, a * cols + b);
    }
  }
  auto var_of = [&index](std::int64_t cell) { return index[cell]; };
  auto cell = [cols](int a, int b) { return static_cast<std::int64_t>(a * cols + b); };
  for (int a = 0; a <= m; ++a) {
    for (int b = 0; b <= q; ++b) {
      if (a + 2 <= m) {
        const double kappa = 2.0 * c.at(a + 1, b) - c.at(a, b) - c.at(a + 2, b);
        add_exchange_pair(lp, cell(a, b), cell(a + 1, b), cell(a + 1, b), cell(a + 2, b), kappa, var_of);
      }
      if (b + 2 <= q) {
        const double kappa = 2.0 * c.at(a, b + 1) - c.at(a, b) - c.at(a, b + 2);
        add_exchange_pair(lp, cell(a, b), cell(a, b + 1), cell(a, b + 1), cell(a, b + 2), kappa, var_of);
      }
      if (a + 1 <= m && b + 1 <= q) {
        const double kappa = c.at(a + 1, b) + c.at(a, b + 1) - c.at(a, b) - c.at(a + 1, b + 1);
        add_exchange_pair(lp, cell(a, b), cell(a + 1, b), cell(a, b + 1), cell(a + 1, b + 1), kappa, var_of);
      }
    }
  }
  if (m >= 1) {
    LpRow r;
    r.coeffs.emplace_back(var_of(cell(1, 0)), 1.0);
    r.kind = RowKind::kNonnegative;
    lp.add_row(std::move(r));
  }
  if (q >= 1) {
    LpRow r;
    r.coeffs.emplace_back(var_of(cell(0, 1)), 1.0);
    r.kind = RowKind::kNonnegative;
    lp.add_row(std::move(r));
  }
  return lp;
}

Decomposition decompose(const SetFunction& l, const DecompOptions& opts) {
  DecompMethod method = opts.method;
  if (method == DecompMethod::kAuto) {
    switch (l.repr()) {
      case Repr::kSymmetric: method = DecompMethod::kSymmetric; break;
      case Repr::kFpFn: method = DecompMethod::kFpFn; break;
      default: method = DecompMethod::kFull; break;
    }
  }
  if (method == DecompMethod::kFpFn && l.repr() != Repr::kFpFn) {
    throw std::invalid_argument("decompose: fpfn method needs an fpfn set function");
  }

  Decomposition d;
  d.method = method;
  std::vector<double> profile;
  switch (method) {
    case DecompMethod::kFull: d.lp = build_full_lp(l, opts.full_cap); break;
    case DecompMethod::kSymmetric:
      profile = symmetric_profile_of(l, kStructureTol);
      d.lp = build_symmetric_lp(profile);
      break;
    case DecompMethod::kFpFn: d.lp = build_fpfn_lp(l.grid()); break;
    case DecompMethod::kAuto: break;
  }

  d.certificate = solve_lp(d.lp, opts.simplex);
  if (d.certificate.status != LpStatus::kOptimal) {
    std::ostringstream msg;
    msg << "decompose: " << to_string(method) << " LP returned " << to_string(d.certificate.status)
        << " after " << d.certificate.pivots << " pivots (" << d.lp.num_vars << " variables, " << d.lp.rows.size()
        << " rows)";
    throw std::runtime_error(msg.str());
  }
  const auto& x = d.certificate.x;
  d.objective = d.certificate.objective;

  switch (method) {
    case DecompMethod::kFull: {
      std::vector<double> table(std::size_t{1} << l.size(), 0.0);
      for (int v = 0; v < d.lp.num_vars; ++v) table[d.lp.var_key[v]] = x[v];
      d.g_star = SetFunction::dense(std::move(table));
      d.f_star = l.repr() == Repr::kDense ? l - d.g_star : SetFunction::dense(l.materialize()) - d.g_star;
      break;
    }
    case DecompMethod::kSymmetric: {
      std::vector<double> cg(profile.size(), 0.0);
      for (int v = 0; v < d.lp.num_vars; ++v) cg[d.lp.var_key[v]] = x[v];
      const int p = static_cast<int>(cg.size()) - 1;
      d.objective = 0.0;
      for (int k = 1; k <= p; ++k) d.objective += binom(p, k) * cg[k];
      d.g_star = SetFunction::symmetric(std::move(cg));
      d.f_star = SetFunction::symmetric(profile) - d.g_star;
      break;
    }
    case DecompMethod::kFpFn: {
      FpFnGrid g(l.grid().m, l.grid().p_neg);
      for (int v = 0; v < d.lp.num_vars; ++v) g.values[d.lp.var_key[v]] = x[v];
      d.g_star = SetFunction::fpfn(std::move(g), l.positives());
      d.f_star = l - d.g_star;
      break;
    }
    case DecompMethod::kAuto: break;
  }
  return d;
}

bool DecompositionCheck::ok() const {
  const double scale = std::max(1.0, std::abs(certificate_objective));
  return additivity_residual <= kAdditivityTol && g_report.is_supermodular && g_report.is_nonnegative &&
         g_report.is_increasing && f_report.is_submodular && replay.primal_infeasibility <= kCertificateTol &&
         replay.dual_infeasibility <= kCertificateTol && std::abs(lp_objective - certificate_objective) <= kGapTol * scale;
}

DecompositionCheck verify_decomposition(const Decomposition& d, const SetFunction& l, const CheckOptions& opts) {
  DecompositionCheck r;
  const auto tl = l.materialize(opts.cap);
  const auto tg = d.g_star.materialize(opts.cap);
  const auto tf = d.f_star.materialize(opts.cap);
  for (std::size_t a = 0; a < tl.size(); ++a) {
    r.additivity_residual = std::max(r.additivity_residual, std::abs(tf[a] + tg[a] - tl[a]));
  }
  r.g_report = check_structure(d.g_star, opts);
  r.f_report = check_structure(d.f_star, opts);
  r.f_nonnegative = r.f_report.is_nonnegative;

  // Rebuild the LP from l and replay the stored duals against this g*.
  LpProblem lp;
  switch (d.method) {
    case DecompMethod::kFull: lp = build_full_lp(l, std::max(kFullLpCap, l.size())); break;
    case DecompMethod::kSymmetric: lp = build_symmetric_lp(symmetric_profile_of(l, kStructureTol)); break;
    case DecompMethod::kFpFn: lp = build_fpfn_lp(l.grid()); break;
    case DecompMethod::kAuto: throw std::invalid_argument("verify_decomposition: unresolved method");
  }
  std::vector<double> x(static_cast<std::size_t>(lp.num_vars));
  for (int v = 0; v < lp.num_vars; ++v) x[v] = d.g_star(representative(l, d.method, lp.var_key[v]));
  std::vector<double> y = d.certificate.duals;
  y.resize(lp.rows.size(), 0.0);
  r.replay = lp_residuals(lp, x, y);

  r.g_total = 0.0;
  for (double v : tg) r.g_total += v;
  r.lp_objective = 0.0;
  for (int v = 0; v < lp.num_vars; ++v) r.lp_objective += lp.objective[v] * x[v];
  r.certificate_objective = d.certificate.dual_objective;
  const double scale = std::max(1.0, std::abs(r.certificate_objective));
  r.canonical = r.replay.primal_infeasibility <= kCertificateTol &&
                std::abs(r.lp_objective - r.certificate_objective) <= kGapTol * scale;
  return r;
}

}  // namespace bdloss
