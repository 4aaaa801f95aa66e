#pragma once

#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "bdloss/decomp.hpp"
#include "bdloss/setfn.hpp"

namespace bdloss {

enum class LossKind { kDice, kDelta1, kDelta2, kDelta3, kDelta4, kHamming };

std::string to_string(LossKind k);
LossKind parse_loss_kind(const std::string& s);

struct LossParams {
  // Unset (NaN) means the per-kind default: 2 for delta2, 0.5 for delta4.
  double alpha = std::numeric_limits<double>::quiet_NaN();
  // Divide by the bag size p.
  bool normalize = false;
  // Unset means on for delta1/delta2 and off elsewhere.
  int clamp = -1;
};

double default_alpha(LossKind k);
bool default_clamp(LossKind k);

struct LossConfig {
  LossKind kind = LossKind::kDice;
  LossParams params;
};

// A loss instantiated for one ground truth: l(A) with A the mistake set.
struct LossSpec {
  std::string name;
  LossKind kind = LossKind::kHamming;
  int p = 0;
  int m = 0;  // positives in y (Dice only)
  double alpha = 0.0;
  bool normalize = false;
  bool clamp = false;
  SetFunction fn;

  double operator()(std::span<const int> y, std::span<const int> y_tilde) const;
};

// Dice counts: m positives, n false negatives, fp false positives.
double dice_value(int m, int n, int fp);

// 1 - 2|y & y~| / (|y| + |y~|) on +-1 labelings. Throws if y has no positives.
double dice_loss(std::span<const int> y, std::span<const int> y_tilde);

// fpfn grid c(n, fp) over the positives of y.
SetFunction dice_as_setfn(std::span<const int> y);
FpFnGrid dice_grid(int m, int p_neg);

struct GainCurves {
  std::vector<int> n_a;
  std::vector<double> a;
  std::vector<double> b;
};

// Gain of one extra false negative at (n_A, p_A) and at (n_A - 1, p_B), for
// n_A = 1..m-2.
GainCurves dice_gain_curves(int m, int p_a, int p_b, int n_max = -1);

// Symmetric track losses in |I| with |y| := p.
std::vector<double> delta_profile(int k, int p, double alpha, bool clamp);
LossSpec delta_k(int k, int p, const LossParams& params = {});
LossSpec hamming(int p);
LossSpec dice(std::span<const int> y);

LossSpec make_loss(const LossConfig& cfg, std::span<const int> y);

// Per-sample loss and canonical decomposition, memoized on the structural key
// ((m, p_neg) for Dice, p otherwise). Safe for concurrent use.
class LossFamily {
 public:
  explicit LossFamily(LossConfig cfg, DecompOptions dopts = {});

  const LossConfig& config() const { return cfg_; }
  LossSpec loss(std::span<const int> y) const { return make_loss(cfg_, y); }
  // Decomposition of loss(y), relabeled onto the positives of y.
  Decomposition decomposition(std::span<const int> y) const;
  int cached() const;

 private:
  std::tuple<int, int> key(std::span<const int> y) const;

  LossConfig cfg_;
  DecompOptions dopts_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, int>, std::shared_ptr<const Decomposition>> cache_;
};

}  // namespace bdloss
