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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>

#include "bdloss/decomp.hpp"
#include "bdloss/losses.hpp"
#include "bdloss/lp.hpp"
#include "oracles.hpp"

using namespace bdloss;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Decomposition LP written out independently for the vertex oracle: variables
// g(A) for A != empty (index A - 1), exchange rows both ways, singleton
// non-negativity and x >= 0.
struct DenseLp {
  std::vector<double> c;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
};

DenseLp oracle_full_lp(const oracle::Table& l, int p) {
  const int n = (1 << p) - 1;
  DenseLp lp;
  lp.c.assign(n, 1.0);
  auto row = [&](std::vector<std::pair<int, double>> terms, double rhs) {
    std::vector<double> r(n, 0.0);
    for (auto [mask, coef] : terms)
      if (mask != 0) r[mask - 1] += coef;
    lp.A.push_back(r);
    lp.b.push_back(rhs);
  };
  for (int a = 0; a < (1 << p); ++a) {
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const int bi = 1 << i, bj = 1 << j;
        if ((a & bi) || (a & bj)) continue;
        const std::vector<std::pair<int, double>> t{{a, 1}, {a | bi | bj, 1}, {a | bi, -1}, {a | bj, -1}};
        row(t, 0.0);
        row(t, l[a] + l[a | bi | bj] - l[a | bi] - l[a | bj]);
      }
    }
  }
  for (int a = 1; a < (1 << p); ++a) row({{a, 1.0}}, 0.0);
  return lp;
}

}  // namespace

TEST_CASE("lp: one-dimensional example") {
  LpProblem prob;
  prob.add_var(1.0, false);
  prob.add_row({{{0, 1.0}}, 3.0});
  const auto s = solve_lp(prob);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.x[0] == doctest::Approx(3.0));
  CHECK(s.duals[0] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(s.dual_objective));
}

TEST_CASE("lp: degenerate rows, infeasible and unbounded problems") {
  LpProblem deg;
  deg.add_var(1.0, true);
  deg.add_var(1.0, true);
  for (int k = 0; k < 5; ++k) deg.add_row({{{0, 1.0}, {1, 1.0}}, 1.0});
  deg.add_row({{{0, 1.0}}, 0.0});
  deg.add_row({{{0, 2.0}, {1, 2.0}}, 2.0});
  const auto s = solve_lp(deg);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(1.0));

  LpProblem inf;
  inf.add_var(1.0, true);
  inf.add_row({{{0, -1.0}}, 1.0});
  CHECK(solve_lp(inf).status == LpStatus::kInfeasible);

  LpProblem unb;
  unb.add_var(-1.0, true);
  unb.add_row({{{0, 1.0}}, 0.0});
  CHECK(solve_lp(unb).status == LpStatus::kUnbounded);
}

TEST_CASE("lp: random problems agree with vertex enumeration") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 3, m = 5 + trial % 4;
    LpProblem prob;
    std::vector<double> c(n);
    for (int v = 0; v < n; ++v) prob.add_var(c[v] = 0.1 + std::abs(u(rng)), true);
    oracle::VertexResult ref;
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    // Most instances are made feasible by construction around x0 >= 0.
    std::vector<double> x0(n);
    for (double& x : x0) x = std::abs(u(rng)) * 2;
    for (int r = 0; r < m; ++r) {
      LpRow row;
      std::vector<double> dense(n);
      double ax = 0.0;
      for (int v = 0; v < n; ++v) {
        row.coeffs.push_back({v, dense[v] = u(rng)});
        ax += dense[v] * x0[v];
      }
      row.rhs = trial % 5 == 0 ? u(rng) + 1.0 : ax - 0.2 * std::abs(u(rng));
      A.push_back(dense);
      b.push_back(row.rhs);
      prob.add_row(row);
    }
    for (int v = 0; v < n; ++v) {
      std::vector<double> e(n, 0.0);
      e[v] = 1.0;
      A.push_back(e);
      b.push_back(0.0);
    }
    ref = oracle::lp_vertices(c, A, b);
    const auto s = solve_lp(prob);
    if (std::isinf(ref.objective)) {
      CHECK(s.status == LpStatus::kInfeasible);
      continue;
    }
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(s.objective == doctest::Approx(ref.objective).epsilon(1e-8));
    CHECK(s.residuals.duality_gap <= 1e-8);
    CHECK(s.residuals.complementary_slackness <= 1e-9);
    ++solved;
  }
  CHECK(solved > 20);
}

TEST_CASE("full lp sizes") {
  const auto l2 = build_full_lp(SetFunction::dense({0, 1, 1, 3}));
  CHECK(l2.num_vars == 3);
  CHECK(l2.count_rows(RowKind::kSupermodular) == 1);
  CHECK(l2.count_rows(RowKind::kSubmodular) == 1);
  CHECK(l2.count_rows(RowKind::kNonnegative) == 2);
  const auto l3 = build_full_lp(SetFunction::symmetric({0, 1, 1, 2}).to_dense());
  CHECK(l3.num_vars == 7);
  CHECK(l3.count_rows(RowKind::kSupermodular) == 6);
  CHECK(l3.count_rows(RowKind::kSubmodular) == 6);
  CHECK(l3.count_rows(RowKind::kNonnegative) == 3);
  const auto l1 = build_full_lp(SetFunction::dense({0, 2}));
  CHECK(l1.num_vars == 1);
  CHECK(l1.rows.size() == 1);
  DecompOptions o;
  o.method = DecompMethod::kFull;
  CHECK(decompose(SetFunction::dense({0, 2}), o).g_star.at_mask(1) == 0.0);
  CHECK_THROWS_AS(build_full_lp(SetFunction::symmetric(std::vector<double>(14, 0.0))), std::invalid_argument);
}

TEST_CASE("symmetric lp examples") {
  const auto d = decompose(SetFunction::symmetric({0, 1, 1, 2}));
  CHECK(d.method == DecompMethod::kSymmetric);
  const std::vector<double> cg{0, 0, 0, 1};
  CHECK(max_diff(d.g_star.profile(), cg) <= 1e-9);
  CHECK(max_diff(d.f_star.profile(), {0, 1, 1, 1}) <= 1e-9);
  CHECK(d.objective == doctest::Approx(1.0));
  CHECK(verify_decomposition(d, SetFunction::symmetric({0, 1, 1, 2})).ok());

  const auto concave = decompose(SetFunction::symmetric({0, 1, 1.5, 1.75}));
  for (double v : concave.g_star.profile()) CHECK(v == doctest::Approx(0.0));
  const auto convex = decompose(SetFunction::symmetric({0, 1, 3, 6}));
  CHECK(max_diff(convex.g_star.profile(), {0, 0, 1, 3}) <= 1e-9);

  // Same LP, three variables, checked against vertex enumeration.
  const auto lp = build_symmetric_lp(std::vector<double>{0, 1, 1, 2});
  CHECK(lp.num_vars == 3);
  const auto full = oracle_full_lp(SetFunction::symmetric({0, 1, 1, 2}).materialize(), 3);
  const auto ref = oracle::lp_vertices(full.c, full.A, full.b);
  CHECK(ref.objective == doctest::Approx(1.0));
}

TEST_CASE("fpfn lp examples") {
  FpFnGrid mod(2, 2), bil(2, 2);
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; b <= 2; ++b) {
      mod.at(a, b) = a + b;
      bil.at(a, b) = a * b;
    }
  }
  const auto dm = decompose(SetFunction::fpfn(mod));
  CHECK(dm.method == DecompMethod::kFpFn);
  for (double v : dm.g_star.grid().values) CHECK(v == doctest::Approx(0.0));
  const auto db = decompose(SetFunction::fpfn(bil));
  CHECK(max_diff(db.g_star.grid().values, bil.values) <= 1e-9);

  // Vertex oracle on the full LP of a small bilinear grid (m = 1, p_neg = 2).
  FpFnGrid small(1, 2);
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 2; ++b) small.at(a, b) = a * b;
  const auto sf = SetFunction::fpfn(small);
  const auto lp = oracle_full_lp(sf.materialize(), 3);
  const auto ref = oracle::lp_vertices(lp.c, lp.A, lp.b);
  const auto ds = decompose(sf);
  CHECK(ds.objective == doctest::Approx(ref.objective));
  std::vector<double> gref(8, 0.0);
  for (int a = 1; a < 8; ++a) gref[a] = ref.x[a - 1];
  CHECK(max_diff(ds.g_star.materialize(), gref) <= 1e-8);

  const auto dice = dice_as_setfn(std::vector<int>{1, 1, 1, -1, -1, -1});
  const auto dd = decompose(dice);
  CHECK(verify_decomposition(dd, dice).ok());
  DecompOptions o;
  o.method = DecompMethod::kFull;
  const auto df = decompose(dice, o);
  CHECK(max_diff(dd.g_star.materialize(), df.g_star.materialize()) <= 1e-8);
  CHECK(dd.objective == doctest::Approx(df.objective).epsilon(1e-10));
}

TEST_CASE("full lp agrees with vertex enumeration at p = 2 and p = 3") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const int p = 2 + trial % 2;
    const auto t = oracle::random_nonneg(p, rng);
    const auto lp = oracle_full_lp(t, p);
    const auto ref = oracle::lp_vertices(lp.c, lp.A, lp.b);
    const auto d = decompose(SetFunction::dense(t));
    CHECK(d.objective == doctest::Approx(ref.objective).epsilon(1e-9));
    std::vector<double> g(t.size(), 0.0);
    for (std::size_t a = 1; a < t.size(); ++a) g[a] = ref.x[a - 1];
    CHECK(max_diff(d.g_star.materialize(), g) <= 1e-8);
  }
}

TEST_CASE("closed forms") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 2 + trial % 4;
    const auto sub = oracle::random_submodular(p, rng);
    const auto ds = decompose(SetFunction::dense(sub));
    for (double v : ds.g_star.materialize()) CHECK(v == 0.0);
    CHECK(max_diff(ds.f_star.materialize(), sub) <= 1e-12);

    const auto sup = oracle::random_supermodular(p, rng);
    const auto dp = decompose(SetFunction::dense(sup));
    const auto g = dp.g_star.materialize();
    for (std::size_t a = 0; a < sup.size(); ++a) {
      double singles = 0.0;
      for (int j = 0; j < p; ++j)
        if ((a >> j) & 1) singles += sup[std::size_t{1} << j];
      CHECK(g[a] == doctest::Approx(sup[a] - singles).epsilon(1e-8));
    }
    CHECK(check_structure(dp.f_star).is_modular);
  }
  const auto ham = decompose(hamming(5).fn);
  for (double v : ham.g_star.materialize()) CHECK(v == 0.0);
}

TEST_CASE("uniqueness under a second pivot order") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = oracle::random_nonneg(4, rng);
    const auto l = SetFunction::dense(t);
    DecompOptions o;
    const auto a = decompose(l, o);
    o.simplex.column_order.resize(15);
    std::iota(o.simplex.column_order.rbegin(), o.simplex.column_order.rend(), 0);
    const auto b = decompose(l, o);
    CHECK(max_diff(a.g_star.materialize(), b.g_star.materialize()) <= 1e-8);
  }
}

TEST_CASE("reduced lps agree with the full lp") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0, 1);
  DecompOptions full;
  full.method = DecompMethod::kFull;
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 2 + trial % 4;
    std::vector<double> c(p + 1, 0.0);
    for (int k = 1; k <= p; ++k) c[k] = u(rng) * 2;
    const auto l = SetFunction::symmetric(c);
    CHECK(max_diff(decompose(l).g_star.materialize(), decompose(l, full).g_star.materialize()) <= 1e-8);

    const int m = 1 + trial % 3, q = 1 + (trial / 3) % 3;
    FpFnGrid g(m, q);
    for (std::size_t k = 1; k < g.values.size(); ++k) g.values[k] = u(rng);
    Subset pos(m + q);
    for (int k = 0; k < m; ++k) pos.set(m + q - 1 - k);
    const auto f = SetFunction::fpfn(g, pos);
    CHECK(max_diff(decompose(f).g_star.materialize(), decompose(f, full).g_star.materialize()) <= 1e-8);
  }
}

TEST_CASE("verify: negative controls") {
  std::mt19937_64 rng(41);
  const auto t = oracle::random_nonneg(4, rng);
  const auto l = SetFunction::dense(t);
  const auto d = decompose(l);
  const auto ok = verify_decomposition(d, l);
  CHECK(ok.ok());
  CHECK(ok.canonical);
  CHECK(ok.replay.duality_gap <= 1e-8);

  auto tampered = d;
  auto tg = d.g_star.materialize();
  tg[5] += 1e-3;
  tampered.g_star = SetFunction::dense(tg);
  CHECK_FALSE(verify_decomposition(tampered, l).ok());

  // Another valid split: move a non-modular supermodular h from f* to g*.
  const auto h = oracle::random_supermodular(4, rng);
  auto other = d;
  other.g_star = d.g_star + SetFunction::dense(h);
  other.f_star = d.f_star - SetFunction::dense(h);
  const auto oc = verify_decomposition(other, l);
  CHECK(oc.additivity_residual <= 1e-12);
  CHECK(oc.g_report.is_supermodular);
  CHECK(oc.f_report.is_submodular);
  CHECK_FALSE(oc.canonical);
  CHECK(oc.g_total > oc.certificate_objective);

  const auto d3 = delta_k(3, 6).fn;
  const auto c3 = verify_decomposition(decompose(d3), d3);
  CHECK(c3.ok());
  CHECK_FALSE(c3.f_nonnegative);
}

TEST_CASE("method dispatch errors") {
  DecompOptions o;
  o.method = DecompMethod::kFpFn;
  CHECK_THROWS_AS(decompose(SetFunction::dense({0, 1}), o), std::invalid_argument);
  CHECK(parse_decomp_method("symmetric") == DecompMethod::kSymmetric);
  CHECK_THROWS(parse_decomp_method("simplex"));
}

TEST_CASE("symmetric decomposition matches the least convex majorant at large p") {
  // c_g[k] = sum_{j<k} (k - j) * max(0, second difference of c at j).
  for (int p : {12, 30, 60, 100}) {
    for (int k : {1, 2, 3, 4}) {
      const auto c = delta_profile(k, p, k == 2 ? 2.0 : 0.5, k <= 2);
      const auto d = decompose(SetFunction::symmetric(c));
      REQUIRE(d.certificate.status == LpStatus::kOptimal);
      for (int n = 0; n <= p; ++n) {
        double ref = 0.0;
        for (int j = 1; j < n; ++j) ref += (n - j) * std::max(0.0, c[j + 1] - 2 * c[j] + c[j - 1]);
        CHECK(d.g_star.profile()[n] == doctest::Approx(ref).epsilon(1e-9));
      }
    }
  }
}
