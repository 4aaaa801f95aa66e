#include "bdloss/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bdloss {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// max(0, max_k plane_k(w)) over the working set of sample i.
double working_xi(const WorkingSet& ws, int i, std::span<const double> w) {
  double xi = 0.0;
  for (const auto& pl : ws.planes[i]) xi = std::max(xi, pl.eval(w));
  return xi;
}

SurrogateOptions options_for(const TrainerConfig& cfg) {
  SurrogateOptions o;
  o.exact_cap = cfg.exact_cap;
  return o;
}

}  // namespace

std::string to_string(SurrogateKind k) {
  switch (k) {
    case SurrogateKind::kBD: return "bd";
    case SurrogateKind::kSlackGreedy: return "slack_greedy";
    case SurrogateKind::kSlackExact: return "slack_exact";
    case SurrogateKind::kLovasz: return "lovasz";
    case SurrogateKind::kZeroOne: return "zero_one";
  }
  return "unknown";
}

SurrogateKind parse_surrogate_kind(const std::string& s) {
  for (auto k : {SurrogateKind::kBD, SurrogateKind::kSlackGreedy, SurrogateKind::kSlackExact, SurrogateKind::kLovasz,
                 SurrogateKind::kZeroOne}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown surrogate '" + s + "' (expected bd|slack_greedy|slack_exact|lovasz|zero_one)");
}

std::vector<SampleLoss> prepare_losses(std::span<const Sample> data, const LossFamily& family, SurrogateKind kind) {
  std::vector<SampleLoss> out;
  out.reserve(data.size());
  for (const auto& s : data) {
    SampleLoss sl;
    sl.loss = family.loss(s.y);
    if (kind == SurrogateKind::kBD) sl.dec = family.decomposition(s.y);
    out.push_back(std::move(sl));
  }
  return out;
}

int WorkingSet::total_planes() const {
  int n = 0;
  for (const auto& p : planes) n += static_cast<int>(p.size());
  return n;
}

void WorkingSet::add(int i, CuttingPlane plane) {
  planes[i].push_back(std::move(plane));
  alpha[i].push_back(0.0);
}

QpSolution solve_restricted_qp(WorkingSet& ws, double C, int dim, double tol, long max_sweeps) {
  const int n = ws.samples();
  QpSolution sol;
  sol.w.assign(static_cast<std::size_t>(dim), 0.0);
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < ws.planes[i].size(); ++k) {
      const double a = ws.alpha[i][k];
      if (a == 0.0) continue;
      const auto& g = ws.planes[i][k].gradient;
      for (int t = 0; t < dim; ++t) sol.w[t] -= a * g[t];
    }
  }

  std::vector<double> grad, diff(static_cast<std::size_t>(dim));
  for (sol.sweeps = 0; sol.sweeps < max_sweeps; ++sol.sweeps) {
    double sweep_max = 0.0;
    for (int i = 0; i < n; ++i) {
      auto& planes = ws.planes[i];
      auto& alpha = ws.alpha[i];
      const int K = static_cast<int>(planes.size());
      if (K == 0) continue;
      grad.resize(static_cast<std::size_t>(K));
      // Index K stands for the implicit zero plane.
      for (int step = 0; step < 10 * (K + 1); ++step) {
        double a0 = C;
        for (double a : alpha) a0 -= a;
        // Rounding residue of C - sum(alpha) is not a usable multiplier.
        if (a0 <= 1e-12 * C) a0 = 0.0;
        for (int k = 0; k < K; ++k) grad[k] = planes[k].eval(sol.w);
        int u = K, v = -1;
        double gu = 0.0, gv = std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
          if (grad[k] > gu) {
            gu = grad[k];
            u = k;
          }
        }
        if (a0 > 0.0) {
          gv = 0.0;
          v = K;
        }
        for (int k = 0; k < K; ++k) {
          if (alpha[k] > 0.0 && grad[k] < gv) {
            gv = grad[k];
            v = k;
          }
        }
        const double viol = v < 0 ? 0.0 : gu - gv;
        if (step == 0) sweep_max = std::max(sweep_max, viol);
        if (viol <= tol || u == v) break;
        for (int t = 0; t < dim; ++t) {
          const double au = u == K ? 0.0 : planes[u].gradient[t];
          const double av = v == K ? 0.0 : planes[v].gradient[t];
          diff[t] = au - av;
        }
        const double q = dot(diff, diff);
        const double cap = v == K ? a0 : alpha[v];
        const double delta = q > 1e-14 ? std::min(cap, viol / q) : cap;
        if (u < K) alpha[u] += delta;
        if (v < K) alpha[v] = delta == cap ? 0.0 : alpha[v] - delta;
        for (int t = 0; t < dim; ++t) sol.w[t] -= delta * diff[t];
      }
    }
    sol.max_kkt_violation = sweep_max;
    if (sweep_max <= tol) break;
  }

  sol.xi.assign(static_cast<std::size_t>(n), 0.0);
  double lin = 0.0, sum_xi = 0.0;
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < ws.planes[i].size(); ++k) lin += ws.alpha[i][k] * ws.planes[i][k].offset;
    sol.xi[i] = working_xi(ws, i, sol.w);
    sum_xi += sol.xi[i];
  }
  const double half_norm = 0.5 * dot(sol.w, sol.w);
  sol.dual_objective = lin - half_norm;
  sol.primal_objective = half_norm + C * sum_xi;
  return sol;
}

SurrogateResult surrogate_eval(SurrogateKind kind, const SampleLoss& sl, std::span<const int> y,
                               std::span<const double> h, const SurrogateOptions& opts) {
  switch (kind) {
    case SurrogateKind::kBD:
      if (!sl.dec) throw std::invalid_argument("B_D surrogate needs a decomposition");
      return b_surrogate(*sl.dec, y, h, opts);
    case SurrogateKind::kSlackGreedy: return slack_rescale_greedy(sl.loss.fn, y, h);
    case SurrogateKind::kSlackExact: return slack_rescale_exact(sl.loss.fn, y, h, opts);
    case SurrogateKind::kLovasz: return lovasz_hinge(sl.loss.fn, y, h, opts);
    case SurrogateKind::kZeroOne: return hinge_sum(y, h);
  }
  throw std::invalid_argument("unknown surrogate kind");
}

InferenceResult loss_augmented_inference(const LinearModel& model, const Sample& s, const SampleLoss& sl,
                                         SurrogateKind kind, double xi, const SurrogateOptions& opts) {
  const auto h = model.scores(s.x);
  auto r = surrogate_eval(kind, sl, s.y, h, opts);
  InferenceResult out;
  out.value = r.value;
  out.violation = r.value - xi;
  out.plane = lift_plane(r.plane, model, s.x);
  return out;
}

GapReport primal_dual_gap(const LinearModel& model, std::span<const Sample> data, std::span<const SampleLoss> losses,
                          const WorkingSet& ws, double master_obj, const TrainerConfig& cfg) {
  const auto opts = options_for(cfg);
  const auto& w = model.weights();
  GapReport g;
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto h = model.scores(data[i].x);
    const double v = surrogate_eval(cfg.kind, losses[i], data[i].y, h, opts).value;
    g.h_values.push_back(v);
    // The working-set max also lower-bounds the surrogate (exactly so unless
    // inference is greedy).
    double xi = std::max(0.0, v);
    if (i < static_cast<std::size_t>(ws.samples())) xi = std::max(xi, working_xi(ws, static_cast<int>(i), w));
    sum += xi;
  }
  g.primal = 0.5 * dot(w, w) + cfg.C * sum;
  g.dual = master_obj;
  g.gap = g.primal - g.dual;
  return g;
}

TrainResult train_cutting_plane(std::span<const Sample> data, const LossFamily& family, const TrainerConfig& cfg) {
  if (!(cfg.C > 0.0) || !(cfg.eps > 0.0)) throw std::invalid_argument("C and eps must be positive");
  if (data.empty()) throw std::invalid_argument("training set is empty");
  const int d = static_cast<int>(data.front().x.empty() ? 0 : data.front().x.front().size());
  int p_max = 0;
  for (const auto& s : data) {
    if (s.y.empty() || s.x.size() != s.y.size()) throw std::invalid_argument("bag '" + s.bag_id + "' is malformed");
    for (int v : s.y) {
      if (v != 1 && v != -1) throw std::invalid_argument("bag '" + s.bag_id + "' has a label other than +-1");
    }
    if (cfg.mode == WeightMode::kPerPosition && s.size() != data.front().size()) {
      throw std::invalid_argument("per_position weights need equal bag sizes; use shared mode");
    }
    p_max = std::max(p_max, s.size());
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto opts = options_for(cfg);
  const auto losses = prepare_losses(data, family, cfg.kind);
  const int n = static_cast<int>(data.size());

  TrainResult res;
  res.model = LinearModel(cfg.mode, d, cfg.mode == WeightMode::kPerPosition ? data.front().size() : 0, cfg.augmented);
  res.ws = WorkingSet(n);
  res.trace.exact_slack = cfg.kind == SurrogateKind::kSlackExact ||
                          (cfg.kind == SurrogateKind::kBD && uses_exact_slack(p_max, opts));
  const int dim = res.model.dim();
  QpSolution qp;
  qp.w.assign(static_cast<std::size_t>(dim), 0.0);

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    TraceRow row;
    row.iter = iter;
    row.max_violation = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double xi = working_xi(res.ws, i, res.model.weights());
      auto inf = loss_augmented_inference(res.model, data[i], losses[i], cfg.kind, xi, opts);
      row.sum_violation += std::max(0.0, inf.violation);
      row.max_violation = std::max(row.max_violation, inf.violation);
      if (inf.violation > cfg.eps) {
        res.ws.add(i, std::move(inf.plane));
        qp = solve_restricted_qp(res.ws, cfg.C, dim, cfg.qp_tol, cfg.qp_max_sweeps);
        res.model.weights() = qp.w;
        ++row.added;
      }
    }
    res.master_obj = res.ws.total_planes() > 0 ? qp.dual_objective : 0.0;
    row.master_obj = res.master_obj;
    row.planes = res.ws.total_planes();
    if (cfg.trace_gap) {
      const auto g = primal_dual_gap(res.model, data, losses, res.ws, res.master_obj, cfg);
      row.primal_obj = g.primal;
      row.gap = g.gap;
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.trace.rows.push_back(row);
    if (row.added == 0) {
      res.trace.converged = true;
      break;
    }
  }
  res.trace.truncated = !res.trace.converged;
  res.xi.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) res.xi[i] = working_xi(res.ws, i, res.model.weights());
  return res;
}

std::vector<int> predict(const LinearModel& model, const Bag& x) { return model.predict(x); }

LossSummary evaluate(const LinearModel& model, std::span<const Sample> data, const LossConfig& loss) {
  LossSummary s;
  s.name = to_string(loss.kind);
  s.n = static_cast<int>(data.size());
  if (data.empty()) return s;
  std::vector<double> v;
  v.reserve(data.size());
  for (const auto& smp : data) {
    const auto yhat = model.predict(smp.x);
    v.push_back(make_loss(loss, smp.y)(smp.y, yhat));
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  s.mean = mean;
  s.std_error = v.size() > 1 ? std::sqrt(ss / (v.size() - 1) / v.size()) : 0.0;
  return s;
}

std::vector<LossSummary> evaluate(const LinearModel& model, std::span<const Sample> data,
                                  std::span<const LossConfig> losses) {
  std::vector<LossSummary> out;
  for (const auto& l : losses) out.push_back(evaluate(model, data, l));
  return out;
}

}  // namespace bdloss
