// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bdloss/decomp.hpp"
#include "bdloss/harness.hpp"
#include "bdloss/io.hpp"
#include "bdloss/losses.hpp"
#include "bdloss/trainer.hpp"

namespace fs = std::filesystem;
using namespace bdloss;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string config;
  json cfg = json::object();
};

struct LossFlags {
  std::string loss = "dice";
  double alpha = std::numeric_limits<double>::quiet_NaN();
  bool normalize = false;
  std::string clamp = "default";

  void add(CLI::App* app) {
    app->add_option("--loss", loss, "dice|delta1|delta2|delta3|delta4|hamming")->capture_default_str();
    app->add_option("--alpha", alpha, "alpha for delta2/delta4 (defaults 2 and 0.5)");
    app->add_flag("--normalize", normalize, "divide the loss by the bag size");
    app->add_option("--clamp", clamp, "clamp track losses at zero: on|off|default")
        ->check(CLI::IsMember({"on", "off", "default"}));
  }

  LossConfig config() const {
    LossConfig c;
    c.kind = parse_loss_kind(loss);
    c.params.alpha = alpha;
    c.params.normalize = normalize;
    c.params.clamp = clamp == "default" ? -1 : clamp == "on" ? 1 : 0;
    return c;
  }
};

struct TrainFlags {
  std::string surrogate = "bd";
  double C = 1.0;
  double eps = 1e-3;
  int max_iter = 500;
  std::string mode = "shared";
  bool augmented = false;
  int exact_cap = kExactSlackCap;

  void add(CLI::App* app) {
    app->add_option("--surrogate", surrogate, "bd|slack_greedy|slack_exact|lovasz|zero_one")->capture_default_str();
    app->add_option("--C", C, "regularization trade-off")->capture_default_str();
    app->add_option("--eps", eps, "violation tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "outer iteration limit")->capture_default_str();
    app->add_option("--mode", mode, "shared|per_position")->capture_default_str();
    app->add_flag("--augmented", augmented, "append a constant feature");
    app->add_option("--exact-cap", exact_cap, "largest p for exact slack inference")->capture_default_str();
  }

  TrainerConfig config() const {
    TrainerConfig t;
    t.kind = parse_surrogate_kind(surrogate);
    t.C = C;
    t.eps = eps;
    t.max_iter = max_iter;
    t.mode = parse_weight_mode(mode);
    t.augmented = augmented;
    t.exact_cap = exact_cap;
    return t;
  }
};

fs::path out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void write_json(const fs::path& p, const json& j) { write_text_file(p.string(), j.dump(2) + "\n"); }

std::vector<Sample> load_data(const std::string& path) {
  std::vector<std::string> warnings;
  auto data = ingest(path, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << path << ": " << w << "\n";
  return data;
}

SynthConfig synth_from(const Globals& g) {
  SynthConfig c;
  if (g.cfg.contains("synth")) c = synth_config_from_json(g.cfg.at("synth"), c);
  c.seed = g.seed;
  return c;
}

SetFunction loss_setfn(const LossFlags& lf, int p, int m) {
  const auto cfg = lf.config();
  std::vector<int> y(static_cast<std::size_t>(p), -1);
  for (int j = 0; j < m && j < p; ++j) y[j] = 1;
  return make_loss(cfg, y).fn;
}

void print_structure(const SetFunction& f) {
  const auto r = check_structure(f);
  std::cout << report_to_json(r, f.size()).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-function decomposition, convex surrogates and cutting-plane training"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--config", g.config, "JSON config with optional \"synth\" and \"experiment\" sections");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic train/test bags (JSONL)");
  int s_train = 200, s_test = 200, s_p = 6;
  synth->add_option("--train", s_train, "training bags")->capture_default_str();
  synth->add_option("--test", s_test, "test bags")->capture_default_str();
  synth->add_option("--p", s_p, "bag size")->capture_default_str();

  // decompose
  auto* dec = app.add_subcommand("decompose", "canonical decomposition of a set function");
  std::string d_in, d_out = "decomposition.json", d_method = "auto";
  dec->add_option("--in", d_in, "set-function JSON")->required();
  dec->add_option("--out", d_out, "output JSON (relative to --out-dir)")->capture_default_str();
  dec->add_option("--method", d_method, "auto|full|symmetric|fpfn")->capture_default_str();

  // check
  auto* chk = app.add_subcommand("check", "structural report of a set function");
  std::string c_in;
  int c_p = 6, c_m = 3;
  LossFlags c_loss;
  chk->add_option("--in", c_in, "set-function JSON (otherwise the loss given by --loss)");
  chk->add_option("--p", c_p, "ground set size for --loss")->capture_default_str();
  chk->add_option("--m", c_m, "positives for the Dice loss")->capture_default_str();
  c_loss.add(chk);

  // train
  auto* train = app.add_subcommand("train", "cutting-plane training");
  std::string t_data, t_model = "model.json", t_trace = "trace.csv";
  LossFlags t_loss;
  TrainFlags t_flags;
  train->add_option("--data", t_data, "training JSONL")->required();
  train->add_option("--model", t_model, "model output (relative to --out-dir)")->capture_default_str();
  train->add_option("--trace", t_trace, "trace CSV (relative to --out-dir)")->capture_default_str();
  t_loss.add(train);
  t_flags.add(train);

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a model");
  std::string e_model, e_data;
  std::vector<std::string> e_losses{"dice", "hamming"};
  ev->add_option("--model", e_model, "model JSON")->required();
  ev->add_option("--data", e_data, "JSONL bags")->required();
  ev->add_option("--losses", e_losses, "evaluation losses")->delimiter(',')->capture_default_str();

  // cross-table
  auto* ct = app.add_subcommand("cross-table", "train surrogates x evaluation losses table");
  int x_repeats = 5, x_train = 200, x_test = 200, x_p = 6;
  std::string x_data, x_test_data;
  std::vector<std::string> x_surr{"bd", "zero_one", "slack_greedy"}, x_evals{"dice", "hamming"};
  std::vector<double> x_cgrid{0.1, 1.0, 10.0};
  LossFlags x_loss;
  double x_eps = 1e-3;
  ct->add_option("--repeats", x_repeats, "synthetic repeats (seeds seed..seed+repeats-1)")->capture_default_str();
  ct->add_option("--train", x_train, "training bags per repeat")->capture_default_str();
  ct->add_option("--test", x_test, "test bags per repeat")->capture_default_str();
  ct->add_option("--p", x_p, "bag size")->capture_default_str();
  ct->add_option("--data", x_data, "training JSONL (instead of synthetic data)");
  ct->add_option("--test-data", x_test_data, "test JSONL (with --data)");
  ct->add_option("--surrogates", x_surr, "training surrogates")->delimiter(',')->capture_default_str();
  ct->add_option("--eval-losses", x_evals, "evaluation losses")->delimiter(',')->capture_default_str();
  ct->add_option("--c-grid", x_cgrid, "C values selected by validation")->delimiter(',')->capture_default_str();
  ct->add_option("--eps", x_eps, "violation tolerance")->capture_default_str();
  x_loss.add(ct);

  // gap-trace
  auto* gt = app.add_subcommand("gap-trace", "primal-dual gap traces per surrogate");
  std::string g_data;
  std::vector<std::string> g_surr{"bd", "zero_one", "slack_greedy"};
  LossFlags g_loss;
  TrainFlags g_flags;
  gt->add_option("--data", g_data, "training JSONL (default: synthetic)");
  gt->add_option("--surrogates", g_surr, "surrogates")->delimiter(',')->capture_default_str();
  g_loss.add(gt);
  g_flags.add(gt);

  // timing
  auto* tm = app.add_subcommand("timing", "time of one loss-augmented inference");
  std::vector<int> tm_grid{10, 50, 100};
  int tm_repeats = 20;
  std::vector<std::string> tm_surr{"bd", "slack_greedy"};
  std::string tm_slack = "greedy";
  LossFlags tm_loss;
  tm_loss.loss = "delta1";
  tm->add_option("--p-grid", tm_grid, "bag sizes")->delimiter(',')->capture_default_str();
  tm->add_option("--repeats", tm_repeats, "repeats per cell")->capture_default_str();
  tm->add_option("--surrogates", tm_surr, "surrogates")->delimiter(',')->capture_default_str();
  tm->add_option("--slack", tm_slack, "slack inference inside bd: greedy|auto")
      ->check(CLI::IsMember({"greedy", "auto"}))
      ->capture_default_str();
  tm_loss.add(tm);

  // dice-figure
  auto* df = app.add_subcommand("dice-figure", "Dice gain curves for one extra false negative");
  int f_m = 10, f_pa = 8, f_pb = 5, f_nmax = 8;
  df->add_option("--m", f_m, "ground-truth positives")->capture_default_str();
  df->add_option("--pa", f_pa, "false positives of A")->capture_default_str();
  df->add_option("--pb", f_pb, "false positives of B")->capture_default_str();
  df->add_option("--n-max", f_nmax, "largest n_A")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (!g.config.empty()) g.cfg = read_json_file(g.config);

    if (synth->parsed()) {
      auto c = synth_from(g);
      if (synth->count("--train")) c.bags_train = s_train;
      if (synth->count("--test")) c.bags_test = s_test;
      if (synth->count("--p")) c.p = s_p;
      const auto d = synth_generate(c);
      std::ofstream tr(out_path(g, "train.jsonl")), te(out_path(g, "test.jsonl"));
      write_jsonl(tr, d.train);
      write_jsonl(te, d.test);
      write_json(out_path(g, "synth_config.json"), synth_config_to_json(c));
      std::cout << "wrote " << d.train.size() << " train and " << d.test.size() << " test bags to " << g.out_dir
                << "\n";
    } else if (dec->parsed()) {
      const auto l = setfn_from_json(read_json_file(d_in));
      DecompOptions o;
      o.method = parse_decomp_method(d_method);
      const auto d = decompose(l, o);
      CheckOptions co;
      co.cap = std::max(kExhaustiveCap, l.size());
      const auto c = verify_decomposition(d, l, co);
      write_json(out_path(g, d_out), decomposition_to_json(d, c));
      std::cout << "method=" << to_string(d.method) << " objective=" << d.objective
                << " f_nonnegative=" << (c.f_nonnegative ? "yes" : "no") << " ok=" << (c.ok() ? "yes" : "no")
                << "\n";
    } else if (chk->parsed()) {
      print_structure(c_in.empty() ? loss_setfn(c_loss, c_p, c_m) : setfn_from_json(read_json_file(c_in)));
    } else if (train->parsed()) {
      const auto data = load_data(t_data);
      const LossFamily family(t_loss.config());
      const auto tc = t_flags.config();
      const auto res = train_cutting_plane(data, family, tc);
      write_json(out_path(g, t_model), model_to_json(res.model));
      std::ofstream tr(out_path(g, t_trace));
      write_trace_csv(tr, res.trace);
      const auto& last = res.trace.rows.back();
      std::cerr << "slack inference: " << (res.trace.exact_slack ? "exact" : "greedy") << "\n";
      std::cout << "iterations=" << res.trace.rows.size() << " planes=" << last.planes
                << " master_obj=" << last.master_obj << " gap=" << last.gap << "\n";
      if (!res.trace.converged) throw NonConvergence("no convergence within " + std::to_string(tc.max_iter) +
                                                     " iterations");
    } else if (ev->parsed()) {
      const auto model = model_from_json(read_json_file(e_model));
      const auto data = load_data(e_data);
      json out = json::array();
      for (const auto& name : e_losses) {
        LossConfig lc;
        lc.kind = parse_loss_kind(name);
        const auto s = evaluate(model, data, lc);
        std::cout << s.name << ": " << s.mean << " +- " << s.std_error << " (n=" << s.n << ")\n";
        out.push_back(json{{"loss", s.name}, {"mean", s.mean}, {"std_error", s.std_error}, {"n", s.n}});
      }
      write_json(out_path(g, "eval.json"), out);
    } else if (ct->parsed()) {
      ExperimentConfig ec;
      if (g.cfg.contains("experiment")) ec = experiment_config_from_json(g.cfg.at("experiment"), ec);
      ec.seed = g.seed;
      if (ct->count("--surrogates")) {
        ec.surrogates.clear();
        for (const auto& s : x_surr) ec.surrogates.push_back(parse_surrogate_kind(s));
      }
      if (ct->count("--eval-losses")) {
        ec.eval_losses.clear();
        for (const auto& s : x_evals) ec.eval_losses.push_back(LossConfig{parse_loss_kind(s), {}});
      }
      if (ct->count("--c-grid")) ec.c_grid = x_cgrid;
      if (ct->count("--eps")) ec.trainer.eps = x_eps;
      if (ct->count("--loss") || ct->count("--alpha") || ct->count("--normalize") || ct->count("--clamp")) {
        ec.train_loss = x_loss.config();
      }
      std::vector<Dataset> splits;
      if (!x_data.empty()) {
        if (x_test_data.empty()) throw std::invalid_argument("--data needs --test-data");
        splits.push_back(Dataset{load_data(x_data), load_data(x_test_data)});
      } else {
        auto sc = synth_from(g);
        if (ct->count("--train")) sc.bags_train = x_train;
        if (ct->count("--test")) sc.bags_test = x_test;
        if (ct->count("--p")) sc.p = x_p;
        if (x_repeats < 1) throw std::invalid_argument("--repeats must be >= 1");
        for (int r = 0; r < x_repeats; ++r) {
          sc.seed = g.seed + r;
          splits.push_back(synth_generate(sc));
        }
      }
      const auto table = run_cross_table(splits, ec);
      for (const auto& line : table.log) std::cerr << line << "\n";
      write_text_file(out_path(g, "cross_table.csv").string(), table.to_csv());
      auto j = table.to_json();
      j["config"] = experiment_config_to_json(ec);
      write_json(out_path(g, "cross_table.json"), j);
      std::cout << table.to_csv();
      for (const auto& row : table.converged) {
        for (bool c : row) {
          if (!c) throw NonConvergence("at least one training run hit the iteration limit");
        }
      }
    } else if (gt->parsed()) {
      std::vector<Sample> data;
      if (!g_data.empty()) {
        data = load_data(g_data);
      } else {
        data = synth_generate(synth_from(g)).train;
      }
      std::vector<SurrogateKind> kinds;
      for (const auto& s : g_surr) kinds.push_back(parse_surrogate_kind(s));
      const auto runs = run_gap_trace(data, g_loss.config(), kinds, g_flags.config(), g.out_dir);
      bool all = true;
      std::cout << "surrogate,iterations,final_gap,final_max_violation,converged\n";
      for (const auto& r : runs) {
        std::cout << to_string(r.kind) << ',' << r.iterations << ',' << r.final_gap << ',' << r.final_max_violation
                  << ',' << (r.trace.converged ? 1 : 0) << "\n";
        all = all && r.trace.converged;
      }
      if (!all) throw NonConvergence("at least one surrogate hit the iteration limit");
    } else if (tm->parsed()) {
      TimingConfig tc;
      tc.p_grid = tm_grid;
      tc.repeats = tm_repeats;
      tc.loss = tm_loss.config();
      tc.seed = g.seed;
      tc.slack = tm_slack == "greedy" ? SlackInference::kGreedy : SlackInference::kAuto;
      tc.surrogates.clear();
      for (const auto& s : tm_surr) tc.surrogates.push_back(parse_surrogate_kind(s));
      const auto rows = run_timing(tc);
      const auto csv = timing_csv(rows);
      write_text_file(out_path(g, "timing.csv").string(), csv);
      std::cout << csv;
    } else if (df->parsed()) {
      const auto c = dice_gain_curves(f_m, f_pa, f_pb, f_nmax);
      std::ostringstream os;
      os << "n_a,gain_a,gain_b\n";
      os.precision(9);
      for (std::size_t k = 0; k < c.n_a.size(); ++k) os << c.n_a[k] << ',' << c.a[k] << ',' << c.b[k] << "\n";
      write_text_file(out_path(g, "dice_gain.csv").string(), os.str());
      std::cout << os.str();
    }
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
