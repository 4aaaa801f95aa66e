#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdloss/decomp.hpp"
#include "bdloss/losses.hpp"
#include "bdloss/model.hpp"
#include "bdloss/surrogates.hpp"

namespace bdloss {

enum class SurrogateKind { kBD, kSlackGreedy, kSlackExact, kLovasz, kZeroOne };

std::string to_string(SurrogateKind k);
SurrogateKind parse_surrogate_kind(const std::string& s);

struct TrainerConfig {
  double C = 1.0;
  double eps = 1e-3;
  int max_iter = 500;
  double qp_tol = 1e-6;
  long qp_max_sweeps = 1'000'000;
  SurrogateKind kind = SurrogateKind::kBD;
  int exact_cap = kExactSlackCap;
  WeightMode mode = WeightMode::kShared;
  bool augmented = false;
  // Evaluate the true surrogate objective after every outer iteration.
  bool trace_gap = true;
};

// Loss of one sample, plus its decomposition when training with B_D.
struct SampleLoss {
  LossSpec loss;
  std::optional<Decomposition> dec;
};

std::vector<SampleLoss> prepare_losses(std::span<const Sample> data, const LossFamily& family, SurrogateKind kind);

// Per-sample weight-space planes and their multipliers. Each sample also
// carries an implicit zero plane whose multiplier is C - sum(alpha).
struct WorkingSet {
  std::vector<std::vector<CuttingPlane>> planes;
  std::vector<std::vector<double>> alpha;

  explicit WorkingSet(int n = 0) : planes(n), alpha(n) {}
  int samples() const { return static_cast<int>(planes.size()); }
  int total_planes() const;
  void add(int i, CuttingPlane plane);
};

struct QpSolution {
  std::vector<double> w;
  std::vector<double> xi;
  double dual_objective = 0.0;
  double primal_objective = 0.0;
  double max_kkt_violation = 0.0;
  long sweeps = 0;
};

// min 1/2 |w|^2 + C sum xi_i  s.t.  xi_i >= b_k + <a_k, w> (k in S^i), xi_i >= 0,
// by pairwise coordinate ascent on the dual, warm-started from ws.alpha.
QpSolution solve_restricted_qp(WorkingSet& ws, double C, int dim, double tol = 1e-6,
                               long max_sweeps = 1'000'000);

// Score-space surrogate of one sample.
SurrogateResult surrogate_eval(SurrogateKind kind, const SampleLoss& sl, std::span<const int> y,
                               std::span<const double> h, const SurrogateOptions& opts);

struct InferenceResult {
  CuttingPlane plane;  // weight space
  double value = 0.0;
  double violation = 0.0;  // value - xi
};

InferenceResult loss_augmented_inference(const LinearModel& model, const Sample& s, const SampleLoss& sl,
                                         SurrogateKind kind, double xi, const SurrogateOptions& opts);

struct TraceRow {
  int iter = 0;
  double master_obj = 0.0;
  double primal_obj = 0.0;
  double gap = 0.0;
  double sum_violation = 0.0;
  double max_violation = 0.0;
  int planes = 0;
  int added = 0;
  double seconds = 0.0;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  bool truncated = false;
  bool exact_slack = false;
};

struct TrainResult {
  LinearModel model;
  TrainTrace trace;
  WorkingSet ws;
  std::vector<double> xi;
  double master_obj = 0.0;
};

TrainResult train_cutting_plane(std::span<const Sample> data, const LossFamily& family, const TrainerConfig& cfg);

struct GapReport {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  std::vector<double> h_values;  // surrogate value per sample at w
};

// [1/2 |w|^2 + C sum_i max(0, H_i(w), max_k plane_k(w))] - master objective.
GapReport primal_dual_gap(const LinearModel& model, std::span<const Sample> data, std::span<const SampleLoss> losses,
                          const WorkingSet& ws, double master_obj, const TrainerConfig& cfg);

std::vector<int> predict(const LinearModel& model, const Bag& x);

struct LossSummary {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
};

// Mean and standard error of l(y_i, predict(x_i)) across samples.
LossSummary evaluate(const LinearModel& model, std::span<const Sample> data, const LossConfig& loss);
std::vector<LossSummary> evaluate(const LinearModel& model, std::span<const Sample> data,
                                  std::span<const LossConfig> losses);

}  // namespace bdloss
