#include "bdloss/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace bdloss {
namespace {

Repr parse_repr(const std::string& s) {
  if (s == "dense") return Repr::kDense;
  if (s == "symmetric") return Repr::kSymmetric;
  if (s == "fpfn") return Repr::kFpFn;
  throw std::invalid_argument("unknown repr '" + s + "' (expected dense|symmetric|fpfn)");
}

json witnesses_to_json(const std::vector<Witness>& ws, int p) {
  json a = json::array();
  for (const auto& w : ws) {
    json e{{"set", Subset::from_mask(p, w.set).elements()}, {"violation", w.violation}};
    if (w.i >= 0) e["i"] = w.i;
    if (w.j >= 0) e["j"] = w.j;
    a.push_back(std::move(e));
  }
  return a;
}

}  // namespace

json setfn_to_json(const SetFunction& f) {
  json j{{"p", f.size()}};
  switch (f.repr()) {
    case Repr::kSymmetric:
      j["repr"] = "symmetric";
      j["values"] = f.profile();
      break;
    case Repr::kFpFn: {
      j["repr"] = "fpfn";
      j["m"] = f.grid().m;
      j["values"] = f.grid().values;
      j["positives"] = f.positives().elements();
      break;
    }
    default:
      j["repr"] = "dense";
      j["values"] = f.materialize();
      break;
  }
  return j;
}

SetFunction setfn_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("set function JSON must be an object");
  for (const char* k : {"p", "repr", "values"}) {
    if (!j.contains(k)) throw std::invalid_argument(std::string("set function JSON lacks \"") + k + "\"");
  }
  const int p = j.at("p").get<int>();
  if (p < 0) throw std::invalid_argument("p must be non-negative");
  auto values = j.at("values").get<std::vector<double>>();
  switch (parse_repr(j.at("repr").get<std::string>())) {
    case Repr::kDense: {
      if (p > kExhaustiveCap || values.size() != (std::size_t{1} << p)) {
        throw std::invalid_argument("dense values must have 2^p entries (p <= 16)");
      }
      return SetFunction::dense(std::move(values));
    }
    case Repr::kSymmetric:
      if (values.size() != std::size_t(p) + 1) throw std::invalid_argument("symmetric values must have p+1 entries");
      return SetFunction::symmetric(std::move(values));
    case Repr::kFpFn: {
      if (!j.contains("m")) throw std::invalid_argument("fpfn set function needs \"m\"");
      const int m = j.at("m").get<int>();
      if (m < 0 || m > p) throw std::invalid_argument("fpfn m must lie in [0, p]");
      FpFnGrid g(m, p - m, std::move(values));
      if (!j.contains("positives")) return SetFunction::fpfn(std::move(g));
      Subset pos(p);
      for (int e : j.at("positives").get<std::vector<int>>()) {
        if (e < 0 || e >= p) throw std::invalid_argument("positive index out of range");
        pos.set(e);
      }
      return SetFunction::fpfn(std::move(g), pos);
    }
    case Repr::kOracle: break;
  }
  throw std::invalid_argument("unsupported repr");
}

json report_to_json(const StructureReport& r, int p) {
  return json{{"submodular", r.is_submodular},
              {"supermodular", r.is_supermodular},
              {"modular", r.is_modular},
              {"increasing", r.is_increasing},
              {"nonnegative", r.is_nonnegative},
              {"submodular_witnesses", witnesses_to_json(r.submodular_witnesses, p)},
              {"supermodular_witnesses", witnesses_to_json(r.supermodular_witnesses, p)},
              {"increasing_witnesses", witnesses_to_json(r.increasing_witnesses, p)},
              {"nonnegative_witnesses", witnesses_to_json(r.nonnegative_witnesses, p)}};
}

json decomposition_to_json(const Decomposition& d, const DecompositionCheck& c) {
  const auto& res = d.certificate.residuals;
  return json{{"method", to_string(d.method)},
              {"g_star", setfn_to_json(d.g_star)},
              {"f_star", setfn_to_json(d.f_star)},
              {"objective", d.objective},
              {"dual_objective", d.certificate.dual_objective},
              {"pivots", d.certificate.pivots},
              {"lp", {{"variables", d.lp.num_vars}, {"rows", d.lp.rows.size()}}},
              {"residuals",
               {{"primal_infeasibility", res.primal_infeasibility},
                {"dual_infeasibility", res.dual_infeasibility},
                {"complementary_slackness", res.complementary_slackness},
                {"duality_gap", res.duality_gap},
                {"additivity", c.additivity_residual}}},
              {"g_supermodular", c.g_report.is_supermodular},
              {"g_nonnegative", c.g_report.is_nonnegative},
              {"g_increasing", c.g_report.is_increasing},
              {"f_submodular", c.f_report.is_submodular},
              {"f_nonnegative", c.f_nonnegative},
              {"canonical", c.canonical},
              {"ok", c.ok()}};
}

json model_to_json(const LinearModel& m) {
  json j{{"mode", to_string(m.mode())}, {"d", m.feature_dim()}, {"w", m.weights()}, {"augmented", m.augmented()}};
  if (m.mode() == WeightMode::kPerPosition) j["p"] = m.positions();
  return j;
}

LinearModel model_from_json(const json& j) {
  for (const char* k : {"mode", "d", "w"}) {
    if (!j.contains(k)) throw std::invalid_argument(std::string("model JSON lacks \"") + k + "\"");
  }
  const auto mode = parse_weight_mode(j.at("mode").get<std::string>());
  const int p = mode == WeightMode::kPerPosition ? j.at("p").get<int>() : 0;
  LinearModel m(mode, j.at("d").get<int>(), p, j.value("augmented", false));
  auto w = j.at("w").get<std::vector<double>>();
  if (static_cast<int>(w.size()) != m.dim()) {
    throw std::invalid_argument("model has " + std::to_string(w.size()) + " weights, expected " +
                                std::to_string(m.dim()));
  }
  m.weights() = std::move(w);
  return m;
}

void write_trace_csv(std::ostream& os, const TrainTrace& t) {
  os << "iter,master_obj,primal_obj,gap,max_violation,planes,seconds\n";
  os << std::setprecision(12);
  for (const auto& r : t.rows) {
    os << r.iter << ',' << r.master_obj << ',' << r.primal_obj << ',' << r.gap << ',' << r.max_violation << ','
       << r.planes << ',' << r.seconds << '\n';
  }
}

json sample_to_json(const Sample& s) {
  json items = json::array();
  for (std::size_t j = 0; j < s.y.size(); ++j) items.push_back(json{{"x", s.x[j]}, {"y", s.y[j]}});
  return json{{"bag_id", s.bag_id}, {"items", std::move(items)}};
}

Sample sample_from_json(const json& j) {
  if (!j.is_object() || !j.contains("items")) throw std::invalid_argument("expected {\"bag_id\", \"items\"}");
  Sample s;
  if (j.contains("bag_id")) {
    const auto& id = j.at("bag_id");
    s.bag_id = id.is_string() ? id.get<std::string>() : id.dump();
  }
  const auto& items = j.at("items");
  if (!items.is_array() || items.empty()) throw std::invalid_argument("\"items\" must be a non-empty array");
  for (const auto& it : items) {
    auto x = it.at("x").get<std::vector<double>>();
    const int y = it.at("y").get<int>();
    if (y != 1 && y != -1) throw std::invalid_argument("label must be +1 or -1");
    if (!s.x.empty() && x.size() != s.x.front().size()) throw std::invalid_argument("mixed feature dimensions in bag");
    s.x.push_back(std::move(x));
    s.y.push_back(y);
  }
  return s;
}

void write_jsonl(std::ostream& os, const std::vector<Sample>& data) {
  for (const auto& s : data) os << sample_to_json(s).dump() << '\n';
}

std::vector<Sample> read_jsonl(std::istream& is, std::vector<std::string>* warnings) {
  std::vector<Sample> out;
  std::string line;
  int lineno = 0;
  for (; std::getline(is, line); ) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(sample_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (out.back().bag_id.empty()) out.back().bag_id = std::to_string(lineno);
    if (out.back().x.front().size() != out.front().x.front().size()) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": feature dimension " +
                                  std::to_string(out.back().x.front().size()) + " differs from " +
                                  std::to_string(out.front().x.front().size()));
    }
  }
  if (out.empty() && warnings) warnings->push_back("dataset is empty");
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace bdloss
