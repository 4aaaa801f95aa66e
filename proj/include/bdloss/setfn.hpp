#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bdloss/subset.hpp"

namespace bdloss {

// Absolute tolerance for every structural inequality.
inline constexpr double kStructureTol = 1e-9;
// Largest ground set for which exhaustive (2^p) operations are allowed.
inline constexpr int kExhaustiveCap = 16;

enum class Repr { kDense, kSymmetric, kFpFn, kOracle };

std::string to_string(Repr r);

// Values indexed by (false negatives, false positives): rows 0..m, columns
// 0..p_neg, row-major.
struct FpFnGrid {
  int m = 0;
  int p_neg = 0;
  std::vector<double> values;

  FpFnGrid() = default;
  FpFnGrid(int m, int p_neg);
  FpFnGrid(int m, int p_neg, std::vector<double> values);

  int rows() const { return m + 1; }
  int cols() const { return p_neg + 1; }
  double at(int fn, int fp) const { return values[fn * cols() + fp]; }
  double& at(int fn, int fp) { return values[fn * cols() + fp]; }
};

// A normalized set function l : 2^V -> R with l(empty) = 0.
//
// Four representations are supported:
//  - dense:     2^p values indexed by subset bitmask;
//  - symmetric: l(A) = c(|A|), profile c[0..p];
//  - fpfn:      l(A) = c(|A & P|, |A \ P|) for a fixed set P of positive
//               elements (mistakes on P are false negatives);
//  - oracle:    arbitrary callable.
class SetFunction {
 public:
  using Oracle = std::function<double(const Subset&)>;

  SetFunction() = default;

  static SetFunction dense(std::vector<double> table);
  static SetFunction symmetric(std::vector<double> profile);
  // Positives are elements 0..m-1.
  static SetFunction fpfn(FpFnGrid grid);
  static SetFunction fpfn(FpFnGrid grid, Subset positives);
  static SetFunction modular(std::span<const double> weights);
  static SetFunction from_oracle(int p, Oracle fn);

  int size() const { return p_; }
  Repr repr() const { return repr_; }

  double operator()(const Subset& a) const;
  // Requires p <= 63.
  double at_mask(std::uint64_t a) const;

  const std::vector<double>& table() const;
  const std::vector<double>& profile() const;
  const FpFnGrid& grid() const;
  const Subset& positives() const;

  // All 2^p values in bitmask order; refuses p > cap.
  std::vector<double> materialize(int cap = kExhaustiveCap) const;
  SetFunction to_dense(int cap = kExhaustiveCap) const;

  // Sum of l(A) over every subset A of V.
  double total(int cap = kExhaustiveCap) const;

  SetFunction operator-() const;
  SetFunction scaled(double s) const;
  friend SetFunction operator+(const SetFunction& a, const SetFunction& b);
  friend SetFunction operator-(const SetFunction& a, const SetFunction& b);

 private:
  static SetFunction combine(const SetFunction& a, const SetFunction& b, double sign);

  int p_ = 0;
  Repr repr_ = Repr::kDense;
  std::vector<double> values_;  // table, profile or grid values
  FpFnGrid grid_;
  Subset positives_;
  Oracle oracle_;
};

// Set of positions where two +-1 labelings disagree.
Subset mistake_set(std::span<const int> y, std::span<const int> y_tilde);

struct Witness {
  enum class Kind {
    kExchange,   // f(A+i) + f(A+j) vs f(A) + f(A+i+j)
    kIncrement,  // f(A) vs f(A+i)
    kValue,      // f(A) < 0
  };
  Kind kind = Kind::kExchange;
  std::uint64_t set = 0;
  int i = -1;
  int j = -1;
  double violation = 0.0;  // amount by which the inequality fails
};

struct StructureReport {
  bool is_submodular = true;
  bool is_supermodular = true;
  bool is_modular = true;
  bool is_increasing = true;
  bool is_nonnegative = true;
  std::vector<Witness> submodular_witnesses;
  std::vector<Witness> supermodular_witnesses;
  std::vector<Witness> increasing_witnesses;
  std::vector<Witness> nonnegative_witnesses;
};

struct CheckOptions {
  double tol = kStructureTol;
  int cap = kExhaustiveCap;
  std::size_t max_witnesses = 8;
};

// Exhaustive structural check. Submodularity uses the local exchange
// condition f(A+i) + f(A+j) >= f(A) + f(A+i+j) for all A and i, j not in A.
StructureReport check_structure(const SetFunction& f, const CheckOptions& opts = {});

// w_j = -min_{A subset V} [g(A + j) - g(A)]; g + m_g is increasing.
std::vector<double> modular_shift_weights(const SetFunction& g, int cap = kExhaustiveCap);
SetFunction modular_shift(const SetFunction& g, int cap = kExhaustiveCap);

// f restricted to subsets of S, with the members of S re-indexed 0..|S|-1
// in increasing order.
SetFunction restrict(const SetFunction& f, const Subset& s);

}  // namespace bdloss
