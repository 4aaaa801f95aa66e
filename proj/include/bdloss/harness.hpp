#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bdloss/io.hpp"
#include "bdloss/losses.hpp"
#include "bdloss/trainer.hpp"

namespace bdloss {

struct Gaussian {
  std::vector<double> mean;
  std::vector<std::vector<double>> cov;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  int bags_train = 200;
  int bags_test = 200;
  int p = 6;
  int d = 2;
  Gaussian positive{{1.5, 1.5}, {{0.5, 0.0}, {0.0, 0.5}}};
  std::vector<double> negative_weights{0.5, 0.5};
  std::vector<Gaussian> negative{{{-1.0, -1.0}, {{0.5, 0.0}, {0.0, 0.5}}},
                                 {{2.0, -2.0}, {{0.5, 0.0}, {0.0, 0.5}}}};
  // Positives per bag are drawn uniformly from [min_pos, max_pos]; -1 means p - 1.
  int min_pos = 1;
  int max_pos = -1;

  void validate() const;
};

json synth_config_to_json(const SynthConfig& c);
SynthConfig synth_config_from_json(const json& j, SynthConfig base = {});

struct Dataset {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

Dataset synth_generate(const SynthConfig& cfg);

// JSONL reader with validation; variable bag sizes are allowed.
std::vector<Sample> ingest(const std::string& path, std::vector<std::string>* warnings = nullptr);

struct ExperimentConfig {
  std::vector<SurrogateKind> surrogates{SurrogateKind::kBD, SurrogateKind::kZeroOne, SurrogateKind::kSlackGreedy};
  LossConfig train_loss{LossKind::kDice, {}};
  std::vector<LossConfig> eval_losses{{LossKind::kDice, {}}, {LossKind::kHamming, {}}};
  std::vector<double> c_grid{0.1, 1.0, 10.0};
  // Fraction of each training split held out to select C.
  double validation_fraction = 1.0 / 3.0;
  TrainerConfig trainer;
  std::uint64_t seed = 0;

  void validate() const;
};

json experiment_config_to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const json& j, ExperimentConfig base = {});

struct Cell {
  double mean = 0.0;
  double std_error = 0.0;
  double median = 0.0;
  std::vector<double> per_split;
};

struct ResultTable {
  std::vector<std::string> rows;  // training surrogates
  std::vector<std::string> cols;  // evaluation losses
  std::vector<std::vector<Cell>> cells;
  std::vector<std::vector<double>> chosen_c;  // [row][split]
  std::vector<std::vector<int>> iterations;   // [row][split]
  std::vector<std::vector<bool>> converged;   // [row][split]
  std::vector<std::string> log;
  std::string config_hash;
  double seconds = 0.0;

  std::string to_csv() const;
  json to_json() const;
  const Cell& at(const std::string& row, const std::string& col) const;
};

// 64-bit FNV-1a of the canonical JSON dump, as hex.
std::string config_hash(const json& j);

ResultTable run_cross_table(const std::vector<Dataset>& splits, const ExperimentConfig& cfg);

struct GapRun {
  SurrogateKind kind = SurrogateKind::kBD;
  TrainTrace trace;
  int iterations = 0;
  double final_gap = 0.0;
  double final_max_violation = 0.0;
};

// One trainer trace per surrogate; CSV files are written when out_dir is set.
std::vector<GapRun> run_gap_trace(const std::vector<Sample>& data, const LossConfig& loss,
                                  const std::vector<SurrogateKind>& surrogates, const TrainerConfig& cfg,
                                  const std::string& out_dir = "");

struct TimingRow {
  int p = 0;
  SurrogateKind kind = SurrogateKind::kBD;
  double mean = 0.0;
  double std_error = 0.0;
  double median = 0.0;
  int repeats = 0;
};

struct TimingConfig {
  std::vector<int> p_grid{10, 50, 100};
  LossConfig loss{LossKind::kDelta1, {}};
  std::vector<SurrogateKind> surrogates{SurrogateKind::kBD, SurrogateKind::kSlackGreedy};
  int repeats = 20;
  // Slack inference inside B_D; greedy matches the plain slack baseline.
  SlackInference slack = SlackInference::kGreedy;
  std::uint64_t seed = 0;
};

// Wall time of one loss-augmented inference on random bags.
std::vector<TimingRow> run_timing(const TimingConfig& cfg);
std::string timing_csv(const std::vector<TimingRow>& rows);

double median(std::vector<double> v);

}  // namespace bdloss
