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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <limits>

#include "bdloss/decomp.hpp"
#include "bdloss/harness.hpp"
#include "bdloss/losses.hpp"
#include "bdloss/setfn.hpp"
#include "bdloss/surrogates.hpp"
#include "bdloss/trainer.hpp"

namespace py = pybind11;
using namespace bdloss;

namespace {

Subset to_subset(int p, const std::vector<int>& elems) {
  Subset s(p);
  for (int e : elems) {
    if (e < 0 || e >= p) throw py::index_error("element out of range");
    s.set(e);
  }
  return s;
}

py::dict report_dict(const StructureReport& r) {
  auto wit = [](const std::vector<Witness>& ws) {
    py::list out;
    for (const auto& w : ws) {
      py::dict d;
      d["set"] = w.set;
      d["i"] = w.i;
      d["j"] = w.j;
      d["violation"] = w.violation;
      out.append(d);
    }
    return out;
  };
  py::dict d;
  d["submodular"] = r.is_submodular;
  d["supermodular"] = r.is_supermodular;
  d["modular"] = r.is_modular;
  d["increasing"] = r.is_increasing;
  d["nonnegative"] = r.is_nonnegative;
  d["submodular_witnesses"] = wit(r.submodular_witnesses);
  d["supermodular_witnesses"] = wit(r.supermodular_witnesses);
  return d;
}

py::dict result_dict(const SurrogateResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["offset"] = r.plane.offset;
  d["gradient"] = r.plane.gradient;
  d["kind"] = to_string(r.plane.kind);
  return d;
}

LossConfig loss_config(const std::string& loss, double alpha, bool normalize, int clamp) {
  LossConfig c;
  c.kind = parse_loss_kind(loss);
  c.params.alpha = alpha;
  c.params.normalize = normalize;
  c.params.clamp = clamp;
  return c;
}

Sample to_sample(const py::dict& d) {
  Sample s;
  if (d.contains("bag_id")) s.bag_id = py::str(d["bag_id"]);
  s.x = d["x"].cast<Bag>();
  s.y = d["y"].cast<std::vector<int>>();
  if (s.x.size() != s.y.size()) throw py::value_error("x and y differ in length");
  return s;
}

py::dict from_sample(const Sample& s) {
  py::dict d;
  d["bag_id"] = s.bag_id;
  d["x"] = s.x;
  d["y"] = s.y;
  return d;
}

std::vector<Sample> to_samples(const py::list& l) {
  std::vector<Sample> out;
  for (const auto& item : l) out.push_back(to_sample(item.cast<py::dict>()));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Set-function decomposition, convex surrogates and cutting-plane training";

  py::class_<SetFunction>(m, "SetFunction")
      .def_static("dense", &SetFunction::dense, py::arg("table"))
      .def_static("symmetric", &SetFunction::symmetric, py::arg("profile"))
      .def_static("fpfn",
                  [](int m_pos, int p_neg, std::vector<double> values) {
                    return SetFunction::fpfn(FpFnGrid(m_pos, p_neg, std::move(values)));
                  },
                  py::arg("m"), py::arg("p_neg"), py::arg("values"))
      .def_static("modular", [](std::vector<double> w) { return SetFunction::modular(w); }, py::arg("weights"))
      .def_property_readonly("p", &SetFunction::size)
      .def_property_readonly("repr", [](const SetFunction& f) { return to_string(f.repr()); })
      .def("__call__", [](const SetFunction& f, const std::vector<int>& elems) { return f(to_subset(f.size(), elems)); })
      .def("at_mask", &SetFunction::at_mask)
      .def("materialize", &SetFunction::materialize, py::arg("cap") = kExhaustiveCap)
      .def("total", &SetFunction::total, py::arg("cap") = kExhaustiveCap);

  m.def("check_structure", [](const SetFunction& f) { return report_dict(check_structure(f)); }, py::arg("f"));
  m.def("mistake_set", [](const std::vector<int>& y, const std::vector<int>& yt) { return mistake_set(y, yt).elements(); });

  py::class_<Decomposition>(m, "Decomposition")
      .def_readonly("g_star", &Decomposition::g_star)
      .def_readonly("f_star", &Decomposition::f_star)
      .def_readonly("objective", &Decomposition::objective)
      .def_property_readonly("method", [](const Decomposition& d) { return to_string(d.method); })
      .def_property_readonly("dual_objective", [](const Decomposition& d) { return d.certificate.dual_objective; });

  m.def(
      "decompose",
      [](const SetFunction& l, const std::string& method) {
        DecompOptions o;
        o.method = parse_decomp_method(method);
        return decompose(l, o);
      },
      py::arg("l"), py::arg("method") = "auto");
  m.def(
      "verify_decomposition",
      [](const Decomposition& d, const SetFunction& l) {
        const auto c = verify_decomposition(d, l);
        py::dict r;
        r["additivity_residual"] = c.additivity_residual;
        r["g_supermodular"] = c.g_report.is_supermodular;
        r["f_submodular"] = c.f_report.is_submodular;
        r["f_nonnegative"] = c.f_nonnegative;
        r["canonical"] = c.canonical;
        r["ok"] = c.ok();
        return r;
      },
      py::arg("d"), py::arg("l"));

  m.def("lovasz_hinge", [](const SetFunction& f, std::vector<int> y, std::vector<double> h) {
    return result_dict(lovasz_hinge(f, y, h));
  });
  m.def("slack_rescale_exact", [](const SetFunction& g, std::vector<int> y, std::vector<double> h) {
    return result_dict(slack_rescale_exact(g, y, h));
  });
  m.def("slack_rescale_greedy", [](const SetFunction& g, std::vector<int> y, std::vector<double> h) {
    return result_dict(slack_rescale_greedy(g, y, h));
  });
  m.def("b_surrogate", [](const Decomposition& d, std::vector<int> y, std::vector<double> h) {
    return result_dict(b_surrogate(d, y, h));
  });
  m.def("hinge_sum", [](std::vector<int> y, std::vector<double> h) { return result_dict(hinge_sum(y, h)); });

  m.def("dice_loss", [](std::vector<int> y, std::vector<int> yt) { return dice_loss(y, yt); });
  m.def("dice_as_setfn", [](std::vector<int> y) { return dice_as_setfn(y); });
  m.def("dice_gain_curves", [](int mm, int pa, int pb, int n_max) {
    const auto c = dice_gain_curves(mm, pa, pb, n_max);
    return py::make_tuple(c.n_a, c.a, c.b);
  }, py::arg("m"), py::arg("p_a"), py::arg("p_b"), py::arg("n_max") = -1);
  m.def(
      "loss_setfn",
      [](const std::string& loss, std::vector<int> y, double alpha, bool normalize, int clamp) {
        return make_loss(loss_config(loss, alpha, normalize, clamp), y).fn;
      },
      py::arg("loss"), py::arg("y"), py::arg("alpha") = std::numeric_limits<double>::quiet_NaN(),
      py::arg("normalize") = false, py::arg("clamp") = -1);

  m.def(
      "synth_generate",
      [](std::uint64_t seed, int bags_train, int bags_test, int p) {
        SynthConfig c;
        c.seed = seed;
        c.bags_train = bags_train;
        c.bags_test = bags_test;
        c.p = p;
        const auto d = synth_generate(c);
        py::list tr, te;
        for (const auto& s : d.train) tr.append(from_sample(s));
        for (const auto& s : d.test) te.append(from_sample(s));
        return py::make_tuple(tr, te);
      },
      py::arg("seed") = 0, py::arg("bags_train") = 200, py::arg("bags_test") = 200, py::arg("p") = 6);

  py::class_<LinearModel>(m, "LinearModel")
      .def_property_readonly("weights", [](const LinearModel& lm) { return lm.weights(); })
      .def_property_readonly("mode", [](const LinearModel& lm) { return to_string(lm.mode()); })
      .def("scores", &LinearModel::scores)
      .def("predict", &LinearModel::predict);

  m.def(
      "train",
      [](const py::list& data, const std::string& loss, const std::string& surrogate, double C, double eps,
         int max_iter) {
        const auto samples = to_samples(data);
        const LossFamily family(loss_config(loss, std::numeric_limits<double>::quiet_NaN(), false, -1));
        TrainerConfig tc;
        tc.kind = parse_surrogate_kind(surrogate);
        tc.C = C;
        tc.eps = eps;
        tc.max_iter = max_iter;
        const auto res = train_cutting_plane(samples, family, tc);
        py::list trace;
        for (const auto& r : res.trace.rows) {
          py::dict d;
          d["iter"] = r.iter;
          d["master_obj"] = r.master_obj;
          d["primal_obj"] = r.primal_obj;
          d["gap"] = r.gap;
          d["max_violation"] = r.max_violation;
          d["planes"] = r.planes;
          trace.append(d);
        }
        py::dict out;
        out["model"] = res.model;
        out["trace"] = trace;
        out["converged"] = res.trace.converged;
        return out;
      },
      py::arg("data"), py::arg("loss") = "dice", py::arg("surrogate") = "bd", py::arg("C") = 1.0,
      py::arg("eps") = 1e-3, py::arg("max_iter") = 500);

  m.def(
      "evaluate",
      [](const LinearModel& model, const py::list& data, const std::string& loss) {
        const auto samples = to_samples(data);
        const auto s = evaluate(model, samples, loss_config(loss, std::numeric_limits<double>::quiet_NaN(), false, -1));
        return py::make_tuple(s.mean, s.std_error);
      },
      py::arg("model"), py::arg("data"), py::arg("loss") = "dice");
}
