#include "bdloss/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bdloss {

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::kDice: return "dice";
    case LossKind::kDelta1: return "delta1";
    case LossKind::kDelta2: return "delta2";
    case LossKind::kDelta3: return "delta3";
    case LossKind::kDelta4: return "delta4";
    case LossKind::kHamming: return "hamming";
  }
  return "unknown";
}

LossKind parse_loss_kind(const std::string& s) {
  for (auto k : {LossKind::kDice, LossKind::kDelta1, LossKind::kDelta2, LossKind::kDelta3, LossKind::kDelta4,
                 LossKind::kHamming}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown loss '" + s + "' (expected dice|delta1|delta2|delta3|delta4|hamming)");
}

double default_alpha(LossKind k) {
  if (k == LossKind::kDelta2) return 2.0;
  if (k == LossKind::kDelta4) return 0.5;
  return 0.0;
}

bool default_clamp(LossKind k) { return k == LossKind::kDelta1 || k == LossKind::kDelta2; }

double LossSpec::operator()(std::span<const int> y, std::span<const int> y_tilde) const {
  return fn(mistake_set(y, y_tilde));
}

double dice_value(int m, int n, int fp) {
  if (m <= 0) throw std::invalid_argument("Dice loss is undefined without ground-truth positives");
  if (n < 0 || n > m || fp < 0) throw std::invalid_argument("Dice counts out of range");
  return double(n + fp) / double(2 * m - n + fp);
}

double dice_loss(std::span<const int> y, std::span<const int> y_tilde) {
  if (y.size() != y_tilde.size()) throw std::invalid_argument("dice_loss: length mismatch");
  int pos = 0, pos_t = 0, both = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    pos += y[j] > 0;
    pos_t += y_tilde[j] > 0;
    both += y[j] > 0 && y_tilde[j] > 0;
  }
  if (pos == 0) throw std::invalid_argument("Dice loss is undefined without ground-truth positives");
  return 1.0 - 2.0 * both / double(pos + pos_t);
}

FpFnGrid dice_grid(int m, int p_neg) {
  FpFnGrid g(m, p_neg);
  for (int n = 0; n <= m; ++n) {
    for (int fp = 0; fp <= p_neg; ++fp) g.at(n, fp) = dice_value(m, n, fp);
  }
  return g;
}

SetFunction dice_as_setfn(std::span<const int> y) {
  const int p = static_cast<int>(y.size());
  Subset pos(p);
  for (int j = 0; j < p; ++j) {
    if (y[j] > 0) pos.set(j);
  }
  const int m = pos.count();
  if (m == 0) throw std::invalid_argument("Dice loss is undefined without ground-truth positives");
  return SetFunction::fpfn(dice_grid(m, p - m), pos);
}

GainCurves dice_gain_curves(int m, int p_a, int p_b, int n_max) {
  if (m < 2 || p_a < 0 || p_b < 0) throw std::invalid_argument("dice_gain_curves: invalid counts");
  if (n_max < 0) n_max = m - 2;
  GainCurves c;
  auto gain = [m](int n, int fp) {
    const double d = 2.0 * m - n + fp;
    return (2.0 * m + 2.0 * fp) / ((d - 1.0) * d);
  };
  for (int n = 1; n <= n_max; ++n) {
    c.n_a.push_back(n);
    c.a.push_back(gain(n, p_a));
    c.b.push_back(gain(n - 1, p_b));
  }
  return c;
}

std::vector<double> delta_profile(int k, int p, double alpha, bool clamp) {
  if (p < 1) throw std::invalid_argument("track loss needs p >= 1");
  if (k < 1 || k > 4) throw std::invalid_argument("track loss index must be 1..4");
  if ((k == 2 || k == 4) && !(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  const double t3 = p / 3.0, t4 = p / 4.0;
  std::vector<double> c(static_cast<std::size_t>(p) + 1);
  for (int i = 0; i <= p; ++i) {
    double v = 0.0;
    switch (k) {
      case 1: v = std::min({double(i), t3, i - t3}); break;
      case 2: v = std::min({double(i), t4, i - t4, alpha}); break;
      case 3: v = std::min(std::max(0.0, i - t3), t3); break;
      case 4: v = std::min(std::max(0.0, i - t3), alpha); break;
    }
    c[i] = clamp ? std::max(0.0, v) : v;
  }
  c[0] = 0.0;
  return c;
}

LossSpec delta_k(int k, int p, const LossParams& params) {
  const auto kind = static_cast<LossKind>(static_cast<int>(LossKind::kDelta1) + k - 1);
  LossSpec s;
  s.kind = kind;
  s.name = to_string(kind);
  s.p = p;
  s.alpha = std::isnan(params.alpha) ? default_alpha(kind) : params.alpha;
  s.clamp = params.clamp < 0 ? default_clamp(kind) : params.clamp != 0;
  s.normalize = params.normalize;
  auto c = delta_profile(k, p, s.alpha, s.clamp);
  if (s.normalize) {
    for (auto& v : c) v /= p;
  }
  s.fn = SetFunction::symmetric(std::move(c));
  return s;
}

LossSpec hamming(int p) {
  LossSpec s;
  s.kind = LossKind::kHamming;
  s.name = "hamming";
  s.p = p;
  std::vector<double> c(static_cast<std::size_t>(p) + 1);
  for (int i = 0; i <= p; ++i) c[i] = i;
  s.fn = SetFunction::symmetric(std::move(c));
  return s;
}

LossSpec dice(std::span<const int> y) {
  LossSpec s;
  s.kind = LossKind::kDice;
  s.name = "dice";
  s.p = static_cast<int>(y.size());
  s.fn = dice_as_setfn(y);
  s.m = s.fn.grid().m;
  return s;
}

LossSpec make_loss(const LossConfig& cfg, std::span<const int> y) {
  const int p = static_cast<int>(y.size());
  LossSpec s;
  switch (cfg.kind) {
    case LossKind::kDice: s = dice(y); break;
    case LossKind::kHamming: s = hamming(p); break;
    default: return delta_k(static_cast<int>(cfg.kind) - static_cast<int>(LossKind::kDelta1) + 1, p, cfg.params);
  }
  if (cfg.params.normalize) {
    s.normalize = true;
    s.fn = s.fn.scaled(1.0 / p);
  }
  return s;
}

LossFamily::LossFamily(LossConfig cfg, DecompOptions dopts) : cfg_(cfg), dopts_(std::move(dopts)) {}

std::tuple<int, int> LossFamily::key(std::span<const int> y) const {
  const int p = static_cast<int>(y.size());
  if (cfg_.kind != LossKind::kDice) return {p, 0};
  const int m = static_cast<int>(std::count_if(y.begin(), y.end(), [](int v) { return v > 0; }));
  return {m, p - m};
}

Decomposition LossFamily::decomposition(std::span<const int> y) const {
  const auto k = key(y);
  std::shared_ptr<const Decomposition> base;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = cache_.find(k); it != cache_.end()) base = it->second;
  }
  if (!base) {
    // Canonical representative: positives first.
    std::vector<int> canon(y.size(), -1);
    if (cfg_.kind == LossKind::kDice) std::fill_n(canon.begin(), std::get<0>(k), 1);
    auto d = std::make_shared<const Decomposition>(decompose(make_loss(cfg_, canon).fn, dopts_));
    std::lock_guard<std::mutex> lock(mu_);
    base = cache_.emplace(k, std::move(d)).first->second;
  }
  Decomposition out = *base;
  if (cfg_.kind == LossKind::kDice) {
    const auto l = make_loss(cfg_, y).fn;
    out.g_star = SetFunction::fpfn(base->g_star.grid(), l.positives());
    out.f_star = SetFunction::fpfn(base->f_star.grid(), l.positives());
  }
  return out;
}

int LossFamily::cached() const {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<int>(cache_.size());
}

}  // namespace bdloss
