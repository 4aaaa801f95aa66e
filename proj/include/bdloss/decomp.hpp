#pragma once

#include <span>
#include <string>

#include "bdloss/lp.hpp"
#include "bdloss/setfn.hpp"

namespace bdloss {

// Largest ground set for which the full 2^p - 1 variable LP is built.
inline constexpr int kFullLpCap = 12;

enum class DecompMethod { kAuto, kFull, kSymmetric, kFpFn };

std::string to_string(DecompMethod m);
DecompMethod parse_decomp_method(const std::string& s);

// Supermodularity of g is encoded with local exchange rows
//   g(A) + g(A+i+j) - g(A+i) - g(A+j) >= 0,
// submodularity of l - g with the same expression bounded below by
//   -(l(A+i) + l(A+j) - l(A) - l(A+i+j)),
// and non-negativity on singletons. g(empty) is fixed to 0. All variables
// also carry x >= 0, which the rows already imply.
LpProblem build_full_lp(const SetFunction& l, int cap = kFullLpCap);

// Variables c_g[1..p] with weights binom(p, k); unit weights once binom(p, p/2)
// exceeds 1e12 (same optimum, see the source).
LpProblem build_symmetric_lp(std::span<const double> profile);

// Variables g(a, b) over the grid minus the origin with weights
// binom(m, a) * binom(p_neg, b).
LpProblem build_fpfn_lp(const FpFnGrid& grid);

struct DecompOptions {
  DecompMethod method = DecompMethod::kAuto;
  int full_cap = kFullLpCap;
  SimplexOptions simplex;
};

// Canonical split l = f* + g*: g* is the supermodular, non-negative function
// of least total sum such that f* = l - g* is submodular.
struct Decomposition {
  SetFunction g_star;
  SetFunction f_star;
  DecompMethod method = DecompMethod::kFull;
  LpProblem lp;
  LpSolution certificate;
  // sum over all subsets of g*(A); equals the LP objective.
  double objective = 0.0;
};

Decomposition decompose(const SetFunction& l, const DecompOptions& opts = {});

struct DecompositionCheck {
  double additivity_residual = 0.0;
  StructureReport g_report;
  StructureReport f_report;
  bool f_nonnegative = false;
  // Replay of the stored dual certificate against the given g*.
  LpResiduals replay;
  double g_total = 0.0;
  // Objective of g* in the LP's own weights, and the stored dual bound.
  double lp_objective = 0.0;
  double certificate_objective = 0.0;
  bool canonical = false;

  bool ok() const;
};

DecompositionCheck verify_decomposition(const Decomposition& d, const SetFunction& l,
                                        const CheckOptions& opts = {});

}  // namespace bdloss
