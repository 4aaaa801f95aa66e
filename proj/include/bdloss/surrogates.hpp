#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bdloss/decomp.hpp"
#include "bdloss/model.hpp"
#include "bdloss/setfn.hpp"

namespace bdloss {

// Largest p for which slack rescaling enumerates all 2^p labelings.
inline constexpr int kExactSlackCap = 20;

enum class PlaneKind { kZero, kLovasz, kSlack, kCombined, kHinge };

std::string to_string(PlaneKind k);

// Affine minorant offset + <gradient, z>. Surrogate operators return planes in
// score space (z = h); lift_plane maps them into weight space (z = w).
struct CuttingPlane {
  double offset = 0.0;
  std::vector<double> gradient;
  PlaneKind kind = PlaneKind::kZero;
  // Lovasz part: the sorted permutation that generated the plane.
  std::vector<int> order;
  // Slack part: mistake set of the maximizing labeling.
  Subset mistakes;

  double eval(std::span<const double> z) const;
};

struct SurrogateResult {
  double value = 0.0;
  CuttingPlane plane;

  const std::vector<double>& subgradient() const { return plane.gradient; }
};

enum class SlackInference { kAuto, kExact, kGreedy };

struct SurrogateOptions {
  // Check submodularity before the Lovasz hinge (only when p <= debug_cap).
  bool debug_checks = false;
  int debug_cap = 10;
  int exact_cap = kExactSlackCap;
  SlackInference slack = SlackInference::kAuto;
};

// s^j = 1 - h^j y^j.
std::vector<double> margins(std::span<const int> y, std::span<const double> h);

// (max_pi sum_j s^{pi_j} [f(pi_1..pi_j) - f(pi_1..pi_{j-1})])_+, the max being
// attained by sorting s in decreasing order (ties by index) for submodular f.
SurrogateResult lovasz_hinge(const SetFunction& f, std::span<const int> y, std::span<const double> h,
                             const SurrogateOptions& opts = {});

// max over labelings of g(mistakes) * (1 + <h, y~> - <h, y>), clamped at 0.
SurrogateResult slack_rescale_exact(const SetFunction& g, std::span<const int> y, std::span<const double> h,
                                    const SurrogateOptions& opts = {});

// Best-improvement single-flip ascent from y~ = y and y~ = -y, p passes each.
SurrogateResult slack_rescale_greedy(const SetFunction& g, std::span<const int> y, std::span<const double> h);

// Exact when p <= exact_cap (or forced), greedy otherwise.
SurrogateResult slack_rescale(const SetFunction& g, std::span<const int> y, std::span<const double> h,
                              const SurrogateOptions& opts = {});
bool uses_exact_slack(int p, const SurrogateOptions& opts);

// Lovasz hinge on f* plus slack rescaling on g*.
SurrogateResult b_surrogate(const Decomposition& dec, std::span<const int> y, std::span<const double> h,
                            const SurrogateOptions& opts = {});

// sum_j (1 - h^j y^j)_+, the per-position SVM hinge used as the 0-1 baseline.
SurrogateResult hinge_sum(std::span<const int> y, std::span<const double> h);

CuttingPlane lift_plane(const CuttingPlane& score_plane, const LinearModel& model, const Bag& x);

struct ExtensionReport {
  int vertices = 0;
  double max_gap = 0.0;
  std::vector<std::uint64_t> failing_vertices;  // u as bitmask
};

using SurrogateFn = std::function<double(std::span<const int> y, std::span<const double> h)>;

// Compares the surrogate with l(u) at every vertex u of {0,1}^p, using
// h^j = y^j (1 - u^j) so that s = u.
ExtensionReport extension_check(const SurrogateFn& surrogate, const SetFunction& l, std::span<const int> y,
                                double tol = kStructureTol);

}  // namespace bdloss
