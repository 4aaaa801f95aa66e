#include "bdloss/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bdloss {
namespace {

void check_lengths(std::size_t p, std::span<const int> y, std::span<const double> h) {
  if (y.size() != h.size()) throw std::invalid_argument("labels and scores differ in length");
  if (static_cast<int>(p) != static_cast<int>(y.size())) {
    throw std::invalid_argument("set function size " + std::to_string(p) + " does not match " +
                                std::to_string(y.size()) + " positions");
  }
}

SurrogateResult zero_result(std::size_t p, PlaneKind) {
  SurrogateResult r;
  r.plane.gradient.assign(p, 0.0);
  r.plane.kind = PlaneKind::kZero;
  return r;
}

// Score-space plane of the slack term for mistake set M with value g(M).
SurrogateResult slack_plane(double gm, const Subset& m, std::span<const int> y, double value) {
  SurrogateResult r;
  r.value = value;
  r.plane.offset = gm;
  r.plane.gradient.assign(y.size(), 0.0);
  for (int j : m.elements()) r.plane.gradient[j] = -2.0 * gm * y[j];
  r.plane.kind = PlaneKind::kSlack;
  r.plane.mistakes = m;
  return r;
}

}  // namespace

std::string to_string(PlaneKind k) {
  switch (k) {
    case PlaneKind::kZero: return "zero";
    case PlaneKind::kLovasz: return "lovasz";
    case PlaneKind::kSlack: return "slack";
    case PlaneKind::kCombined: return "combined";
    case PlaneKind::kHinge: return "hinge";
  }
  return "unknown";
}

double CuttingPlane::eval(std::span<const double> z) const {
  if (z.size() != gradient.size()) throw std::invalid_argument("CuttingPlane::eval: dimension mismatch");
  double v = offset;
  for (std::size_t k = 0; k < z.size(); ++k) v += gradient[k] * z[k];
  return v;
}

std::vector<double> margins(std::span<const int> y, std::span<const double> h) {
  if (y.size() != h.size()) throw std::invalid_argument("labels and scores differ in length");
  std::vector<double> s(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) s[j] = 1.0 - h[j] * y[j];
  return s;
}

SurrogateResult lovasz_hinge(const SetFunction& f, std::span<const int> y, std::span<const double> h,
                             const SurrogateOptions& opts) {
  const std::size_t p = y.size();
  check_lengths(static_cast<std::size_t>(f.size()), y, h);
  if (opts.debug_checks && f.size() <= opts.debug_cap) {
    const auto rep = check_structure(f);
    if (!rep.is_submodular) {
      const auto& w = rep.submodular_witnesses.front();
      throw std::invalid_argument("lovasz_hinge: set function is not submodular (A=" +
                                  Subset::from_mask(f.size(), w.set).to_string() + ", i=" + std::to_string(w.i) +
                                  ", j=" + std::to_string(w.j) + ")");
    }
  }
  const auto s = margins(y, h);
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&s](int a, int b) { return s[a] > s[b]; });

  SurrogateResult r;
  r.plane.gradient.assign(p, 0.0);
  Subset prefix(static_cast<int>(p));
  double prev = 0.0, sum = 0.0;
  for (int j : order) {
    prefix.set(j);
    const double cur = f(prefix);
    const double gain = cur - prev;
    prev = cur;
    sum += s[j] * gain;
    r.plane.offset += gain;
    r.plane.gradient[j] = -gain * y[j];
  }
  if (sum <= 0.0) return zero_result(p, PlaneKind::kLovasz);
  r.value = sum;
  r.plane.kind = PlaneKind::kLovasz;
  r.plane.order = std::move(order);
  return r;
}

SurrogateResult slack_rescale_exact(const SetFunction& g, std::span<const int> y, std::span<const double> h,
                                    const SurrogateOptions& opts) {
  const int p = static_cast<int>(y.size());
  check_lengths(static_cast<std::size_t>(g.size()), y, h);
  if (p > opts.exact_cap || p > 62) {
    throw std::invalid_argument("slack_rescale_exact: p = " + std::to_string(p) + " exceeds exact-inference cap " +
                                std::to_string(opts.exact_cap));
  }
  const std::uint64_t n = std::uint64_t{1} << p;
  // margin_sum[M] = sum_{j in M} h^j y^j, filled by lowest-bit recursion.
  std::vector<double> margin_sum(n, 0.0);
  double best = 0.0;
  std::uint64_t arg = 0;
  for (std::uint64_t mset = 1; mset < n; ++mset) {
    const int low = std::countr_zero(mset);
    margin_sum[mset] = margin_sum[mset & (mset - 1)] + h[low] * y[low];
    const double v = g.at_mask(mset) * (1.0 - 2.0 * margin_sum[mset]);
    if (v > best) {
      best = v;
      arg = mset;
    }
  }
  if (arg == 0) return zero_result(static_cast<std::size_t>(p), PlaneKind::kSlack);
  return slack_plane(g.at_mask(arg), Subset::from_mask(p, arg), y, best);
}

SurrogateResult slack_rescale_greedy(const SetFunction& g, std::span<const int> y, std::span<const double> h) {
  const int p = static_cast<int>(y.size());
  check_lengths(static_cast<std::size_t>(g.size()), y, h);
  std::vector<double> t(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) t[j] = h[j] * y[j];

  double best = 0.0;
  Subset best_set(p);
  double best_g = 0.0;

  for (int start = 0; start < 2; ++start) {
    Subset cur = start == 0 ? Subset(p) : Subset::full(p);
    double tsum = 0.0;
    if (start == 1) {
      for (double v : t) tsum += v;
    }
    double cur_g = g(cur);
    double cur_val = cur_g * (1.0 - 2.0 * tsum);
    for (int pass = 0; pass < p; ++pass) {
      int move = -1;
      double move_val = cur_val, move_g = 0.0;
      for (int j = 0; j < p; ++j) {
        const bool in = cur.test(j);
        cur.flip(j);
        const double gj = g(cur);
        cur.flip(j);
        const double v = gj * (1.0 - 2.0 * (in ? tsum - t[j] : tsum + t[j]));
        if (v > move_val) {
          move_val = v;
          move = j;
          move_g = gj;
        }
      }
      if (move < 0) break;
      tsum += cur.test(move) ? -t[move] : t[move];
      cur.flip(move);
      cur_val = move_val;
      cur_g = move_g;
    }
    if (cur_val > best) {
      best = cur_val;
      best_set = cur;
      best_g = cur_g;
    }
  }
  if (best <= 0.0) return zero_result(static_cast<std::size_t>(p), PlaneKind::kSlack);
  return slack_plane(best_g, best_set, y, best);
}

bool uses_exact_slack(int p, const SurrogateOptions& opts) {
  switch (opts.slack) {
    case SlackInference::kExact: return true;
    case SlackInference::kGreedy: return false;
    case SlackInference::kAuto: return p <= opts.exact_cap;
  }
  return false;
}

SurrogateResult slack_rescale(const SetFunction& g, std::span<const int> y, std::span<const double> h,
                              const SurrogateOptions& opts) {
  return uses_exact_slack(static_cast<int>(y.size()), opts) ? slack_rescale_exact(g, y, h, opts)
                                                             : slack_rescale_greedy(g, y, h);
}

SurrogateResult b_surrogate(const Decomposition& dec, std::span<const int> y, std::span<const double> h,
                            const SurrogateOptions& opts) {
  auto lov = lovasz_hinge(dec.f_star, y, h, opts);
  auto slack = slack_rescale(dec.g_star, y, h, opts);
  SurrogateResult r;
  r.value = lov.value + slack.value;
  r.plane.offset = lov.plane.offset + slack.plane.offset;
  r.plane.gradient = std::move(lov.plane.gradient);
  for (std::size_t k = 0; k < r.plane.gradient.size(); ++k) r.plane.gradient[k] += slack.plane.gradient[k];
  const bool has_l = lov.plane.kind != PlaneKind::kZero, has_s = slack.plane.kind != PlaneKind::kZero;
  r.plane.kind = has_l && has_s ? PlaneKind::kCombined : has_l ? PlaneKind::kLovasz : has_s ? PlaneKind::kSlack
                                                                                          : PlaneKind::kZero;
  r.plane.order = std::move(lov.plane.order);
  r.plane.mistakes = std::move(slack.plane.mistakes);
  return r;
}

SurrogateResult hinge_sum(std::span<const int> y, std::span<const double> h) {
  const auto s = margins(y, h);
  SurrogateResult r;
  r.plane.gradient.assign(s.size(), 0.0);
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] <= 0.0) continue;
    r.value += s[j];
    r.plane.offset += 1.0;
    r.plane.gradient[j] = -y[j];
  }
  r.plane.kind = r.value > 0.0 ? PlaneKind::kHinge : PlaneKind::kZero;
  return r;
}

CuttingPlane lift_plane(const CuttingPlane& score_plane, const LinearModel& model, const Bag& x) {
  CuttingPlane out = score_plane;
  out.gradient = model.lift(x, score_plane.gradient);
  return out;
}

ExtensionReport extension_check(const SurrogateFn& surrogate, const SetFunction& l, std::span<const int> y,
                                double tol) {
  const int p = l.size();
  if (p > kExhaustiveCap) throw std::invalid_argument("extension_check: p exceeds exhaustive cap");
  if (static_cast<int>(y.size()) != p) throw std::invalid_argument("extension_check: label length mismatch");
  ExtensionReport rep;
  std::vector<double> h(static_cast<std::size_t>(p));
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << p); ++u) {
    for (int j = 0; j < p; ++j) h[j] = y[j] * (((u >> j) & 1u) ? 0.0 : 1.0);
    const double gap = std::abs(surrogate(y, h) - l.at_mask(u));
    ++rep.vertices;
    rep.max_gap = std::max(rep.max_gap, gap);
    if (gap > tol) rep.failing_vertices.push_back(u);
  }
  return rep;
}

}  // namespace bdloss
