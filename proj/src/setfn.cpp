#include "bdloss/setfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bdloss {
namespace {

int log2_exact(std::size_t n) {
  int p = 0;
  while ((std::size_t{1} << p) < n) ++p;
  if ((std::size_t{1} << p) != n) {
    throw std::invalid_argument("dense table length must be a power of two");
  }
  return p;
}

void require_cap(int p, int cap, const char* what) {
  if (p > cap) {
    throw std::invalid_argument(std::string(what) + ": ground set size " + std::to_string(p) +
                                " exceeds exhaustive cap " + std::to_string(cap));
  }
}

}  // namespace

std::string to_string(Repr r) {
  switch (r) {
    case Repr::kDense: return "dense";
    case Repr::kSymmetric: return "symmetric";
    case Repr::kFpFn: return "fpfn";
    case Repr::kOracle: return "oracle";
  }
  return "unknown";
}

FpFnGrid::FpFnGrid(int m_, int p_neg_)
    : m(m_), p_neg(p_neg_), values(std::size_t(m_ + 1) * (p_neg_ + 1), 0.0) {
  if (m_ < 0 || p_neg_ < 0) throw std::invalid_argument("FpFnGrid: negative dimension");
}

FpFnGrid::FpFnGrid(int m_, int p_neg_, std::vector<double> v) : m(m_), p_neg(p_neg_), values(std::move(v)) {
  if (m_ < 0 || p_neg_ < 0) throw std::invalid_argument("FpFnGrid: negative dimension");
  if (values.size() != std::size_t(m + 1) * (p_neg + 1)) {
    throw std::invalid_argument("FpFnGrid: expected " + std::to_string((m + 1) * (p_neg + 1)) +
                                " values, got " + std::to_string(values.size()));
  }
}

SetFunction SetFunction::dense(std::vector<double> table) {
  SetFunction f;
  f.p_ = log2_exact(table.size());
  if (f.p_ < 1) throw std::invalid_argument("dense set function needs p >= 1");
  if (table[0] != 0.0) throw std::invalid_argument("dense set function must have l(empty) = 0");
  f.repr_ = Repr::kDense;
  f.values_ = std::move(table);
  return f;
}

SetFunction SetFunction::symmetric(std::vector<double> profile) {
  if (profile.size() < 2) throw std::invalid_argument("symmetric profile needs p >= 1");
  if (profile[0] != 0.0) throw std::invalid_argument("symmetric profile must have c[0] = 0");
  SetFunction f;
  f.p_ = static_cast<int>(profile.size()) - 1;
  f.repr_ = Repr::kSymmetric;
  f.values_ = std::move(profile);
  return f;
}

SetFunction SetFunction::fpfn(FpFnGrid grid) {
  Subset pos(grid.m + grid.p_neg);
  for (int i = 0; i < grid.m; ++i) pos.set(i);
  return fpfn(std::move(grid), std::move(pos));
}

SetFunction SetFunction::fpfn(FpFnGrid grid, Subset positives) {
  const int p = grid.m + grid.p_neg;
  if (p < 1) throw std::invalid_argument("fpfn set function needs p >= 1");
  if (positives.ground_size() != p || positives.count() != grid.m) {
    throw std::invalid_argument("fpfn positives mask does not match grid dimensions");
  }
  if (grid.at(0, 0) != 0.0) throw std::invalid_argument("fpfn grid must have c(0,0) = 0");
  SetFunction f;
  f.p_ = p;
  f.repr_ = Repr::kFpFn;
  f.grid_ = std::move(grid);
  f.positives_ = std::move(positives);
  return f;
}

SetFunction SetFunction::modular(std::span<const double> weights) {
  const int p = static_cast<int>(weights.size());
  if (p < 1) throw std::invalid_argument("modular set function needs p >= 1");
  std::vector<double> w(weights.begin(), weights.end());
  if (p <= kExhaustiveCap) {
    std::vector<double> table(std::size_t{1} << p, 0.0);
    for (std::size_t a = 1; a < table.size(); ++a) {
      const int low = std::countr_zero(a);
      table[a] = table[a & (a - 1)] + w[low];
    }
    return dense(std::move(table));
  }
  return from_oracle(p, [w](const Subset& a) {
    double s = 0.0;
    for (int i : a.elements()) s += w[i];
    return s;
  });
}

SetFunction SetFunction::from_oracle(int p, Oracle fn) {
  if (p < 1) throw std::invalid_argument("oracle set function needs p >= 1");
  SetFunction f;
  f.p_ = p;
  f.repr_ = Repr::kOracle;
  f.oracle_ = std::move(fn);
  return f;
}

double SetFunction::operator()(const Subset& a) const {
  if (a.ground_size() != p_) {
    throw std::invalid_argument("subset ground size " + std::to_string(a.ground_size()) +
                                " does not match set function size " + std::to_string(p_));
  }
  switch (repr_) {
    case Repr::kDense: return values_[a.mask()];
    case Repr::kSymmetric: return values_[a.count()];
    case Repr::kFpFn: {
      const int fn = a.count_in(positives_);
      return grid_.at(fn, a.count() - fn);
    }
    case Repr::kOracle: return a.empty() ? 0.0 : oracle_(a);
  }
  return 0.0;
}

double SetFunction::at_mask(std::uint64_t a) const {
  if (p_ < 64 && (a >> p_) != 0) throw std::out_of_range("subset mask outside ground set");
  switch (repr_) {
    case Repr::kDense: return values_[a];
    case Repr::kSymmetric: return values_[popcount(a)];
    case Repr::kFpFn: {
      const std::uint64_t pos = positives_.mask();
      const int fn = popcount(a & pos);
      return grid_.at(fn, popcount(a & ~pos));
    }
    case Repr::kOracle: return a == 0 ? 0.0 : oracle_(Subset::from_mask(p_, a));
  }
  return 0.0;
}

const std::vector<double>& SetFunction::table() const {
  if (repr_ != Repr::kDense) throw std::logic_error("table() on non-dense set function");
  return values_;
}

const std::vector<double>& SetFunction::profile() const {
  if (repr_ != Repr::kSymmetric) throw std::logic_error("profile() on non-symmetric set function");
  return values_;
}

const FpFnGrid& SetFunction::grid() const {
  if (repr_ != Repr::kFpFn) throw std::logic_error("grid() on non-fpfn set function");
  return grid_;
}

const Subset& SetFunction::positives() const {
  if (repr_ != Repr::kFpFn) throw std::logic_error("positives() on non-fpfn set function");
  return positives_;
}

std::vector<double> SetFunction::materialize(int cap) const {
  require_cap(p_, cap, "materialize");
  if (repr_ == Repr::kDense) return values_;
  std::vector<double> table(std::size_t{1} << p_);
  for (std::uint64_t a = 0; a < table.size(); ++a) table[a] = at_mask(a);
  return table;
}

SetFunction SetFunction::to_dense(int cap) const {
  return dense(materialize(cap));
}

double SetFunction::total(int cap) const {
  switch (repr_) {
    case Repr::kSymmetric: {
      // sum_k binom(p, k) c(k)
      double s = 0.0, binom = 1.0;
      for (int k = 0; k <= p_; ++k) {
        s += binom * values_[k];
        binom = binom * (p_ - k) / (k + 1);
      }
      return s;
    }
    case Repr::kFpFn: {
      double s = 0.0, ba = 1.0;
      for (int a = 0; a <= grid_.m; ++a) {
        double bb = 1.0;
        for (int b = 0; b <= grid_.p_neg; ++b) {
          s += ba * bb * grid_.at(a, b);
          bb = bb * (grid_.p_neg - b) / (b + 1);
        }
        ba = ba * (grid_.m - a) / (a + 1);
      }
      return s;
    }
    default: {
      const auto t = materialize(cap);
      double s = 0.0;
      for (double v : t) s += v;
      return s;
    }
  }
}

SetFunction SetFunction::scaled(double s) const {
  SetFunction out = *this;
  switch (repr_) {
    case Repr::kDense:
    case Repr::kSymmetric:
      for (auto& v : out.values_) v *= s;
      break;
    case Repr::kFpFn:
      for (auto& v : out.grid_.values) v *= s;
      break;
    case Repr::kOracle: {
      auto inner = oracle_;
      out.oracle_ = [inner, s](const Subset& a) { return s * inner(a); };
      break;
    }
  }
  return out;
}

SetFunction SetFunction::operator-() const { return scaled(-1.0); }

SetFunction SetFunction::combine(const SetFunction& a, const SetFunction& b, double sign) {
  if (a.p_ != b.p_) throw std::invalid_argument("set functions over different ground sets");
  if (a.repr_ == b.repr_) {
    if (a.repr_ == Repr::kDense || a.repr_ == Repr::kSymmetric) {
      SetFunction out = a;
      for (std::size_t k = 0; k < out.values_.size(); ++k) out.values_[k] += sign * b.values_[k];
      return out;
    }
    if (a.repr_ == Repr::kFpFn && a.positives_ == b.positives_) {
      SetFunction out = a;
      for (std::size_t k = 0; k < out.grid_.values.size(); ++k) {
        out.grid_.values[k] += sign * b.grid_.values[k];
      }
      return out;
    }
  }
  if (a.p_ <= kExhaustiveCap && a.repr_ != Repr::kOracle && b.repr_ != Repr::kOracle) {
    auto ta = a.materialize();
    const auto tb = b.materialize();
    for (std::size_t k = 0; k < ta.size(); ++k) ta[k] += sign * tb[k];
    return dense(std::move(ta));
  }
  return from_oracle(a.p_, [a, b, sign](const Subset& s) { return a(s) + sign * b(s); });
}

SetFunction operator+(const SetFunction& a, const SetFunction& b) {
  return SetFunction::combine(a, b, 1.0);
}

SetFunction operator-(const SetFunction& a, const SetFunction& b) {
  return SetFunction::combine(a, b, -1.0);
}

Subset mistake_set(std::span<const int> y, std::span<const int> y_tilde) {
  if (y.size() != y_tilde.size()) {
    throw std::invalid_argument("mistake_set: label vectors differ in length (" +
                                std::to_string(y.size()) + " vs " + std::to_string(y_tilde.size()) + ")");
  }
  Subset s(static_cast<int>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != y_tilde[i]) s.set(static_cast<int>(i));
  }
  return s;
}

StructureReport check_structure(const SetFunction& f, const CheckOptions& opts) {
  const int p = f.size();
  require_cap(p, opts.cap, "check_structure");
  const auto t = f.materialize(opts.cap);
  const std::uint64_t n = t.size();
  const double tol = opts.tol;
  StructureReport r;

  auto record = [&](std::vector<Witness>& list, Witness w) {
    if (list.size() < opts.max_witnesses) list.push_back(w);
  };

  for (std::uint64_t a = 0; a < n; ++a) {
    const double fa = t[a];
    if (fa < -tol) {
      r.is_nonnegative = false;
      record(r.nonnegative_witnesses, {Witness::Kind::kValue, a, -1, -1, -fa});
    }
    for (int i = 0; i < p; ++i) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      if (a & bi) continue;
      const double fai = t[a | bi];
      if (fai < fa - tol) {
        r.is_increasing = false;
        record(r.increasing_witnesses, {Witness::Kind::kIncrement, a, i, -1, fa - fai});
      }
      for (int j = i + 1; j < p; ++j) {
        const std::uint64_t bj = std::uint64_t{1} << j;
        if (a & bj) continue;
        // Positive when the pair is locally supermodular.
        const double excess = fa + t[a | bi | bj] - fai - t[a | bj];
        if (excess > tol) {
          r.is_submodular = false;
          record(r.submodular_witnesses, {Witness::Kind::kExchange, a, i, j, excess});
        } else if (-excess > tol) {
          r.is_supermodular = false;
          record(r.supermodular_witnesses, {Witness::Kind::kExchange, a, i, j, -excess});
        }
      }
    }
  }
  r.is_modular = r.is_submodular && r.is_supermodular;
  return r;
}

std::vector<double> modular_shift_weights(const SetFunction& g, int cap) {
  const int p = g.size();
  require_cap(p, cap, "modular_shift");
  const auto t = g.materialize(cap);
  std::vector<double> w(p);
  for (int j = 0; j < p; ++j) {
    const std::uint64_t bj = std::uint64_t{1} << j;
    // A ranges over all subsets; members containing j contribute a zero gain.
    double lo = std::numeric_limits<double>::infinity();
    for (std::uint64_t a = 0; a < t.size(); ++a) lo = std::min(lo, t[a | bj] - t[a]);
    w[j] = -lo;
  }
  return w;
}

SetFunction modular_shift(const SetFunction& g, int cap) {
  return SetFunction::modular(modular_shift_weights(g, cap));
}

SetFunction restrict(const SetFunction& f, const Subset& s) {
  if (s.ground_size() != f.size()) throw std::invalid_argument("restrict: subset over wrong ground set");
  const auto members = s.elements();
  const int q = static_cast<int>(members.size());
  if (q == 0) throw std::invalid_argument("restrict: empty restriction set");
  switch (f.repr()) {
    case Repr::kSymmetric: {
      const auto& c = f.profile();
      return SetFunction::symmetric(std::vector<double>(c.begin(), c.begin() + q + 1));
    }
    case Repr::kFpFn: {
      const auto& g = f.grid();
      const int m = s.count_in(f.positives());
      FpFnGrid out(m, q - m);
      for (int a = 0; a <= m; ++a) {
        for (int b = 0; b <= q - m; ++b) out.at(a, b) = g.at(a, b);
      }
      Subset pos(q);
      for (int k = 0; k < q; ++k) {
        if (f.positives().test(members[k])) pos.set(k);
      }
      return SetFunction::fpfn(std::move(out), std::move(pos));
    }
    default: break;
  }
  const int p = f.size();
  auto lift = [members, p](const Subset& a) {
    Subset full(p);
    for (int k : a.elements()) full.set(members[k]);
    return full;
  };
  if (q <= kExhaustiveCap) {
    std::vector<double> table(std::size_t{1} << q);
    for (std::uint64_t a = 0; a < table.size(); ++a) table[a] = f(lift(Subset::from_mask(q, a)));
    return SetFunction::dense(std::move(table));
  }
  return SetFunction::from_oracle(q, [f, lift](const Subset& a) { return f(lift(a)); });
}

}  // namespace bdloss
