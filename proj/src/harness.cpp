#include "bdloss/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bdloss {
namespace {

// Lower-triangular L with L L^T = a; throws if a is not positive definite.
std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw std::invalid_argument("covariance must be square");
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s <= 0.0) throw std::invalid_argument("covariance is not positive definite");
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return l;
}

void check_gaussian(const Gaussian& g, int d, const std::string& what) {
  if (static_cast<int>(g.mean.size()) != d) throw std::invalid_argument(what + ": mean has wrong dimension");
  if (static_cast<int>(g.cov.size()) != d) throw std::invalid_argument(what + ": covariance has wrong dimension");
  cholesky(g.cov);
}

std::vector<double> draw(const Gaussian& g, const std::vector<std::vector<double>>& chol, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  const std::size_t d = g.mean.size();
  std::vector<double> e(d);
  for (auto& v : e) v = z(rng);
  std::vector<double> x = g.mean;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k <= i; ++k) x[i] += chol[i][k] * e[k];
  }
  return x;
}

json gaussian_to_json(const Gaussian& g) { return json{{"mean", g.mean}, {"cov", g.cov}}; }

Gaussian gaussian_from_json(const json& j) {
  return Gaussian{j.at("mean").get<std::vector<double>>(), j.at("cov").get<std::vector<std::vector<double>>>()};
}

json loss_to_json(const LossConfig& l) {
  json j{{"kind", to_string(l.kind)}, {"normalize", l.params.normalize}};
  if (!std::isnan(l.params.alpha)) j["alpha"] = l.params.alpha;
  if (l.params.clamp >= 0) j["clamp"] = l.params.clamp != 0;
  return j;
}

LossConfig loss_from_json(const json& j) {
  LossConfig l;
  if (j.is_string()) {
    l.kind = parse_loss_kind(j.get<std::string>());
    return l;
  }
  l.kind = parse_loss_kind(j.at("kind").get<std::string>());
  if (j.contains("alpha")) l.params.alpha = j.at("alpha").get<double>();
  if (j.contains("clamp")) l.params.clamp = j.at("clamp").get<bool>() ? 1 : 0;
  l.params.normalize = j.value("normalize", false);
  return l;
}

Cell summarize(const std::vector<double>& per_split, double within_se) {
  Cell c;
  c.per_split = per_split;
  const double n = static_cast<double>(per_split.size());
  c.mean = std::accumulate(per_split.begin(), per_split.end(), 0.0) / n;
  if (per_split.size() > 1) {
    double ss = 0.0;
    for (double v : per_split) ss += (v - c.mean) * (v - c.mean);
    c.std_error = std::sqrt(ss / (n - 1.0) / n);
  } else {
    c.std_error = within_se;
  }
  c.median = median(per_split);
  return c;
}

// Keeps timed calls from being optimized away.
volatile double sink_ = 0.0;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void SynthConfig::validate() const {
  if (bags_train < 0 || bags_test < 0) throw std::invalid_argument("bag counts must be non-negative");
  if (p < 1 || d < 1) throw std::invalid_argument("p and d must be >= 1");
  check_gaussian(positive, d, "positive class");
  if (negative.empty() || negative.size() != negative_weights.size()) {
    throw std::invalid_argument("negative mixture needs one weight per component");
  }
  double s = 0.0;
  for (double w : negative_weights) {
    if (w < 0.0) throw std::invalid_argument("mixture weights must be non-negative");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must sum to 1");
  for (std::size_t k = 0; k < negative.size(); ++k) check_gaussian(negative[k], d, "negative component");
  const int hi = max_pos < 0 ? p - 1 : max_pos;
  if (min_pos < 0 || hi > p || min_pos > hi) throw std::invalid_argument("positives per bag range is empty");
}

json synth_config_to_json(const SynthConfig& c) {
  json neg = json::array();
  for (const auto& g : c.negative) neg.push_back(gaussian_to_json(g));
  return json{{"seed", c.seed},
              {"bags_train", c.bags_train},
              {"bags_test", c.bags_test},
              {"p", c.p},
              {"d", c.d},
              {"positive", gaussian_to_json(c.positive)},
              {"negative_weights", c.negative_weights},
              {"negative", neg},
              {"min_pos", c.min_pos},
              {"max_pos", c.max_pos}};
}

SynthConfig synth_config_from_json(const json& j, SynthConfig c) {
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("bags_train")) c.bags_train = j.at("bags_train").get<int>();
  if (j.contains("bags_test")) c.bags_test = j.at("bags_test").get<int>();
  if (j.contains("p")) c.p = j.at("p").get<int>();
  if (j.contains("d")) c.d = j.at("d").get<int>();
  if (j.contains("positive")) c.positive = gaussian_from_json(j.at("positive"));
  if (j.contains("negative_weights")) c.negative_weights = j.at("negative_weights").get<std::vector<double>>();
  if (j.contains("negative")) {
    c.negative.clear();
    for (const auto& g : j.at("negative")) c.negative.push_back(gaussian_from_json(g));
  }
  if (j.contains("min_pos")) c.min_pos = j.at("min_pos").get<int>();
  if (j.contains("max_pos")) c.max_pos = j.at("max_pos").get<int>();
  return c;
}

Dataset synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const auto pos_chol = cholesky(cfg.positive.cov);
  std::vector<std::vector<std::vector<double>>> neg_chol;
  for (const auto& g : cfg.negative) neg_chol.push_back(cholesky(g.cov));
  std::discrete_distribution<int> comp(cfg.negative_weights.begin(), cfg.negative_weights.end());
  std::uniform_int_distribution<int> npos(cfg.min_pos, cfg.max_pos < 0 ? cfg.p - 1 : cfg.max_pos);

  auto make = [&](const std::string& prefix, int count) {
    std::vector<Sample> out;
    for (int b = 0; b < count; ++b) {
      Sample s;
      char id[32];
      std::snprintf(id, sizeof id, "%s-%05d", prefix.c_str(), b);
      s.bag_id = id;
      const int m = npos(rng);
      std::vector<int> idx(cfg.p);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      s.y.assign(cfg.p, -1);
      for (int k = 0; k < m; ++k) s.y[idx[k]] = 1;
      for (int j = 0; j < cfg.p; ++j) {
        if (s.y[j] > 0) {
          s.x.push_back(draw(cfg.positive, pos_chol, rng));
        } else {
          const int c = comp(rng);
          s.x.push_back(draw(cfg.negative[c], neg_chol[c], rng));
        }
      }
      out.push_back(std::move(s));
    }
    return out;
  };
  Dataset d;
  d.train = make("train", cfg.bags_train);
  d.test = make("test", cfg.bags_test);
  return d;
}

std::vector<Sample> ingest(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_jsonl(in, warnings);
}

void ExperimentConfig::validate() const {
  if (surrogates.empty()) throw std::invalid_argument("no training surrogates");
  if (eval_losses.empty()) throw std::invalid_argument("no evaluation losses");
  if (c_grid.empty()) throw std::invalid_argument("empty C grid");
  for (double c : c_grid) {
    if (!(c > 0.0)) throw std::invalid_argument("C values must be positive");
  }
  if (!(trainer.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw std::invalid_argument("validation fraction must lie in [0, 1)");
  }
}

json experiment_config_to_json(const ExperimentConfig& c) {
  json s = json::array(), e = json::array();
  for (auto k : c.surrogates) s.push_back(to_string(k));
  for (const auto& l : c.eval_losses) e.push_back(loss_to_json(l));
  return json{{"surrogates", s},
              {"train_loss", loss_to_json(c.train_loss)},
              {"eval_losses", e},
              {"c_grid", c.c_grid},
              {"validation_fraction", c.validation_fraction},
              {"eps", c.trainer.eps},
              {"max_iter", c.trainer.max_iter},
              {"qp_tol", c.trainer.qp_tol},
              {"exact_cap", c.trainer.exact_cap},
              {"mode", to_string(c.trainer.mode)},
              {"augmented", c.trainer.augmented},
              {"seed", c.seed}};
}

ExperimentConfig experiment_config_from_json(const json& j, ExperimentConfig c) {
  if (j.contains("surrogates")) {
    c.surrogates.clear();
    for (const auto& s : j.at("surrogates")) c.surrogates.push_back(parse_surrogate_kind(s.get<std::string>()));
  }
  if (j.contains("train_loss")) c.train_loss = loss_from_json(j.at("train_loss"));
  if (j.contains("eval_losses")) {
    c.eval_losses.clear();
    for (const auto& l : j.at("eval_losses")) c.eval_losses.push_back(loss_from_json(l));
  }
  if (j.contains("c_grid")) c.c_grid = j.at("c_grid").get<std::vector<double>>();
  if (j.contains("validation_fraction")) c.validation_fraction = j.at("validation_fraction").get<double>();
  if (j.contains("eps")) c.trainer.eps = j.at("eps").get<double>();
  if (j.contains("max_iter")) c.trainer.max_iter = j.at("max_iter").get<int>();
  if (j.contains("qp_tol")) c.trainer.qp_tol = j.at("qp_tol").get<double>();
  if (j.contains("exact_cap")) c.trainer.exact_cap = j.at("exact_cap").get<int>();
  if (j.contains("mode")) c.trainer.mode = parse_weight_mode(j.at("mode").get<std::string>());
  if (j.contains("augmented")) c.trainer.augmented = j.at("augmented").get<bool>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

std::string config_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  os << "surrogate,loss,mean,std_error,median\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& cell = cells[r][c];
      os << rows[r] << ',' << cols[c] << ',' << fmt("%.6f", cell.mean) << ',' << fmt("%.6f", cell.std_error) << ','
         << fmt("%.6f", cell.median) << '\n';
    }
  }
  return os.str();
}

json ResultTable::to_json() const {
  json t = json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    json row{{"surrogate", rows[r]}, {"chosen_c", chosen_c[r]}, {"iterations", iterations[r]}};
    json cs = json::object();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& cell = cells[r][c];
      cs[cols[c]] = json{{"mean", cell.mean}, {"std_error", cell.std_error}, {"median", cell.median},
                         {"per_split", cell.per_split}};
    }
    row["losses"] = std::move(cs);
    std::vector<int> conv;
    for (bool b : converged[r]) conv.push_back(b ? 1 : 0);
    row["converged"] = conv;
    t.push_back(std::move(row));
  }
  return json{{"config_hash", config_hash}, {"rows", t}, {"log", log}};
}

const Cell& ResultTable::at(const std::string& row, const std::string& col) const {
  const auto r = std::find(rows.begin(), rows.end(), row);
  const auto c = std::find(cols.begin(), cols.end(), col);
  if (r == rows.end() || c == cols.end()) throw std::out_of_range("no cell " + row + "/" + col);
  return cells[r - rows.begin()][c - cols.begin()];
}

ResultTable run_cross_table(const std::vector<Dataset>& splits, const ExperimentConfig& cfg) {
  cfg.validate();
  if (splits.empty()) throw std::invalid_argument("run_cross_table needs at least one split");
  const auto t0 = std::chrono::steady_clock::now();
  const LossFamily family(cfg.train_loss);

  ResultTable table;
  table.config_hash = config_hash(experiment_config_to_json(cfg));
  for (auto k : cfg.surrogates) table.rows.push_back(to_string(k));
  for (const auto& l : cfg.eval_losses) table.cols.push_back(to_string(l.kind));
  const std::size_t R = cfg.surrogates.size(), L = cfg.eval_losses.size(), S = splits.size();
  std::vector<std::vector<std::vector<double>>> means(R, std::vector<std::vector<double>>(L));
  std::vector<std::vector<double>> last_se(R, std::vector<double>(L, 0.0));
  table.chosen_c.assign(R, {});
  table.iterations.assign(R, {});
  table.converged.assign(R, {});

  for (std::size_t s = 0; s < S; ++s) {
    const auto& train = splits[s].train;
    const auto& test = splits[s].test;
    if (train.empty() || test.empty()) throw std::invalid_argument("split " + std::to_string(s) + " is empty");
    const std::size_t n_val = static_cast<std::size_t>(std::floor(train.size() * cfg.validation_fraction));
    const std::span<const Sample> fit(train.data(), train.size() - n_val);
    const std::span<const Sample> val(train.data() + fit.size(), n_val);

    for (std::size_t r = 0; r < R; ++r) {
      TrainerConfig tc = cfg.trainer;
      tc.kind = cfg.surrogates[r];
      tc.trace_gap = false;
      double best_c = cfg.c_grid.front();
      if (cfg.c_grid.size() > 1 && n_val > 0 && !fit.empty()) {
        double best = std::numeric_limits<double>::infinity();
        for (double c : cfg.c_grid) {
          tc.C = c;
          const auto res = train_cutting_plane(fit, family, tc);
          const double v = evaluate(res.model, val, cfg.train_loss).mean;
          if (v < best) {
            best = v;
            best_c = c;
          }
        }
      }
      tc.C = best_c;
      const auto res = train_cutting_plane(train, family, tc);
      table.chosen_c[r].push_back(best_c);
      table.iterations[r].push_back(static_cast<int>(res.trace.rows.size()));
      table.converged[r].push_back(res.trace.converged);
      std::ostringstream msg;
      msg << "split " << s << " " << to_string(tc.kind) << ": C=" << best_c << " slack="
          << (res.trace.exact_slack ? "exact" : "greedy") << " iterations=" << res.trace.rows.size()
          << (res.trace.converged ? "" : " (truncated)");
      table.log.push_back(msg.str());
      for (std::size_t l = 0; l < L; ++l) {
        const auto e = evaluate(res.model, test, cfg.eval_losses[l]);
        means[r][l].push_back(e.mean);
        last_se[r][l] = e.std_error;
      }
    }
  }
  table.cells.assign(R, std::vector<Cell>(L));
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t l = 0; l < L; ++l) table.cells[r][l] = summarize(means[r][l], last_se[r][l]);
  }
  table.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return table;
}

std::vector<GapRun> run_gap_trace(const std::vector<Sample>& data, const LossConfig& loss,
                                  const std::vector<SurrogateKind>& surrogates, const TrainerConfig& cfg,
                                  const std::string& out_dir) {
  const LossFamily family(loss);
  std::vector<GapRun> out;
  for (auto k : surrogates) {
    TrainerConfig tc = cfg;
    tc.kind = k;
    tc.trace_gap = true;
    auto res = train_cutting_plane(data, family, tc);
    GapRun g;
    g.kind = k;
    g.iterations = static_cast<int>(res.trace.rows.size());
    if (!res.trace.rows.empty()) {
      g.final_gap = res.trace.rows.back().gap;
      g.final_max_violation = res.trace.rows.back().max_violation;
    }
    g.trace = std::move(res.trace);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::ofstream f(std::filesystem::path(out_dir) / ("trace_" + to_string(k) + ".csv"));
      if (!f) throw std::runtime_error("cannot write trace into " + out_dir);
      write_trace_csv(f, g.trace);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<TimingRow> run_timing(const TimingConfig& cfg) {
  if (cfg.repeats < 1) throw std::invalid_argument("timing needs repeats >= 1");
  if (cfg.p_grid.empty() || cfg.surrogates.empty()) throw std::invalid_argument("timing grid is empty");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> z;
  const LossFamily family(cfg.loss);
  SurrogateOptions opts;
  opts.slack = cfg.slack;
  std::vector<TimingRow> out;
  for (int p : cfg.p_grid) {
    if (p < 2) throw std::invalid_argument("timing needs p >= 2");
    std::vector<int> y(static_cast<std::size_t>(p), -1);
    for (int j = 0; j < p; j += 2) y[j] = 1;
    SampleLoss sl;
    sl.loss = family.loss(y);
    sl.dec = family.decomposition(y);
    std::vector<std::vector<double>> h(static_cast<std::size_t>(cfg.repeats), std::vector<double>(p));
    for (auto& hv : h) {
      for (auto& v : hv) v = z(rng);
    }
    for (auto k : cfg.surrogates) {
      std::vector<double> times;
      for (int r = 0; r < cfg.repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        sink_ = surrogate_eval(k, sl, y, h[r], opts).value;
        times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
      TimingRow row;
      row.p = p;
      row.kind = k;
      row.repeats = cfg.repeats;
      row.median = median(times);
      const Cell c = summarize(times, 0.0);
      row.mean = c.mean;
      row.std_error = c.std_error;
      out.push_back(row);
    }
  }
  return out;
}

std::string timing_csv(const std::vector<TimingRow>& rows) {
  std::ostringstream os;
  os << "p,surrogate,mean_s,std_error_s,median_s,repeats\n";
  for (const auto& r : rows) {
    os << r.p << ',' << to_string(r.kind) << ',' << fmt("%.9f", r.mean) << ',' << fmt("%.9f", r.std_error) << ','
       << fmt("%.9f", r.median) << ',' << r.repeats << '\n';
  }
  return os.str();
}

}  // namespace bdloss
