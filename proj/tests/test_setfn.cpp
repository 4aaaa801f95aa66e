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

#include <random>
#include <stdexcept>

#include "bdloss/setfn.hpp"
#include "bdloss/subset.hpp"
#include "oracles.hpp"

using namespace bdloss;

namespace {

Subset of(int p, std::initializer_list<int> elems) {
  Subset s(p);
  for (int e : elems) s.set(e);
  return s;
}

bool witness_violates(const SetFunction& f, const Witness& w, double sign) {
  const int p = f.size();
  const std::uint64_t a = w.set, bi = std::uint64_t{1} << w.i, bj = std::uint64_t{1} << w.j;
  // sign = +1: submodular exchange, sign = -1: supermodular exchange.
  const double lhs = f.at_mask(a | bi) + f.at_mask(a | bj);
  const double rhs = f.at_mask(a) + f.at_mask(a | bi | bj);
  (void)p;
  return sign * (lhs - rhs) < -kStructureTol;
}

}  // namespace

TEST_CASE("subset basics") {
  Subset s(70);
  s.set(0);
  s.set(69);
  CHECK(s.count() == 2);
  CHECK(s.test(69));
  s.flip(69);
  CHECK_FALSE(s.test(69));
  CHECK(Subset::full(5).mask() == 31u);
  CHECK(Subset::from_mask(4, 5).elements() == std::vector<int>{0, 2});
  CHECK(of(4, {1}).is_subset_of(of(4, {1, 3})));
  CHECK_THROWS(Subset::from_mask(65, 1));
}

TEST_CASE("eval examples") {
  const auto sym = SetFunction::symmetric({0, 1, 1, 2});
  CHECK(sym(of(3, {0, 2})) == 1.0);
  CHECK(sym(Subset(3)) == 0.0);
  const auto dense = SetFunction::dense({0, 1, 1, 3});
  CHECK(dense(of(2, {0, 1})) == 3.0);
  CHECK(dense(Subset(2)) == 0.0);
  CHECK_THROWS_AS(dense.at_mask(4), std::out_of_range);
  CHECK_THROWS_AS(dense(Subset(3)), std::invalid_argument);
}

TEST_CASE("representations agree with their defining formulas") {
  FpFnGrid g(2, 2);
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) g.at(a, b) = a * 1.5 + b * b;
  Subset pos = of(4, {1, 3});
  const auto f = SetFunction::fpfn(g, pos);
  for (std::uint64_t a = 0; a < 16; ++a) {
    const int fn = std::popcount(a & 0b1010u), fp = std::popcount(a & 0b0101u);
    CHECK(f.at_mask(a) == doctest::Approx(fn * 1.5 + fp * fp));
  }
  const std::vector<double> w{0.5, -1, 2};
  const auto m = SetFunction::modular(w);
  CHECK(m.at_mask(0b101) == doctest::Approx(2.5));
  CHECK(f.to_dense().table() == f.materialize());
  const auto o = SetFunction::from_oracle(3, [](const Subset& s) { return double(s.count() * s.count()); });
  CHECK(o.at_mask(7) == 9.0);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(SetFunction::dense({0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(SetFunction::dense({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SetFunction::symmetric({0.5, 1}), std::invalid_argument);
  CHECK_THROWS_AS(FpFnGrid(1, 1, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(SetFunction::fpfn(FpFnGrid(1, 1, {1, 1, 1, 1})), std::invalid_argument);
}

TEST_CASE("mistake set examples") {
  CHECK(mistake_set(std::vector<int>{1, 1, -1}, std::vector<int>{1, -1, -1}).elements() == std::vector<int>{1});
  CHECK(mistake_set(std::vector<int>{1, -1}, std::vector<int>{1, -1}).empty());
  CHECK(mistake_set(std::vector<int>{1, 1}, std::vector<int>{-1, -1}).count() == 2);
  CHECK_THROWS_AS(mistake_set(std::vector<int>{1}, std::vector<int>{1, 1}), std::invalid_argument);
}

TEST_CASE("structure examples") {
  const auto concave = check_structure(SetFunction::symmetric({0, 1, 1.5, 1.75}));
  CHECK(concave.is_submodular);
  CHECK(concave.is_increasing);

  const auto convex_fn = SetFunction::symmetric({0, 1, 3, 6});
  const auto convex = check_structure(convex_fn);
  CHECK(convex.is_supermodular);
  CHECK_FALSE(convex.is_submodular);
  REQUIRE_FALSE(convex.submodular_witnesses.empty());
  for (const auto& w : convex.submodular_witnesses) CHECK(witness_violates(convex_fn, w, 1.0));

  const auto neg = check_structure(SetFunction::symmetric({0, -1, -1}));
  CHECK_FALSE(neg.is_nonnegative);
  CHECK_FALSE(neg.is_increasing);

  CHECK_THROWS_AS(check_structure(SetFunction::symmetric(std::vector<double>(18, 0.0))), std::invalid_argument);
}

TEST_CASE("exchange check agrees with the subset-wise definition") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 1 + trial % 5;
    oracle::Table t;
    switch (trial % 3) {
      case 0: t = oracle::random_nonneg(p, rng); break;
      case 1: t = oracle::random_submodular(p, rng); break;
      default: t = oracle::random_supermodular(p, rng); break;
    }
    const auto f = SetFunction::dense(t);
    const auto r = check_structure(f);
    CHECK(r.is_submodular == oracle::submodular(t, p));
    CHECK(r.is_supermodular == oracle::supermodular(t, p));
    CHECK(r.is_increasing == oracle::increasing(t, p));
    CHECK(r.is_modular == (r.is_submodular && r.is_supermodular));
    // Negation duality.
    CHECK(check_structure(-f).is_supermodular == r.is_submodular);
    for (const auto& w : r.submodular_witnesses) CHECK(witness_violates(f, w, 1.0));
    for (const auto& w : r.supermodular_witnesses) CHECK(witness_violates(f, w, -1.0));
    if (r.is_supermodular && r.is_nonnegative) CHECK(r.is_increasing);
  }
}

TEST_CASE("symmetric submodularity follows concave increments") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + trial % 5;
    std::vector<double> c(p + 1, 0.0);
    for (int k = 1; k <= p; ++k) c[k] = u(rng);
    bool concave = true;
    for (int k = 1; k < p; ++k) concave = concave && (c[k + 1] - 2 * c[k] + c[k - 1] <= kStructureTol);
    CHECK(check_structure(SetFunction::symmetric(c)).is_submodular == concave);
  }
}

TEST_CASE("modular shift examples") {
  const auto w1 = modular_shift_weights(SetFunction::dense({0, -2}));
  CHECK(w1[0] == doctest::Approx(2.0));
  CHECK((SetFunction::dense({0, -2}) + modular_shift(SetFunction::dense({0, -2}))).at_mask(1) == doctest::Approx(0));

  const std::vector<double> wts{1, -1};
  const auto g = SetFunction::modular(wts);
  const auto w = modular_shift_weights(g);
  CHECK(w[0] == doctest::Approx(0));
  CHECK(w[1] == doctest::Approx(1));
  CHECK(check_structure(g + modular_shift(g)).is_increasing);

  const auto inc = SetFunction::symmetric({0, 1, 3});
  for (double x : modular_shift_weights(inc)) CHECK(x <= 0.0);
}

TEST_CASE("modular shift makes random functions increasing") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 1 + trial % 5;
    std::vector<double> t(std::size_t{1} << p, 0.0);
    for (std::size_t a = 1; a < t.size(); ++a) t[a] = u(rng);
    const auto g = SetFunction::dense(t);
    const auto m = modular_shift(g);
    const auto rm = check_structure(m);
    CHECK(rm.is_modular);
    CHECK(oracle::increasing((g + m).materialize(), p));
  }
}

TEST_CASE("restrict examples") {
  const auto f = SetFunction::dense({0, 1, 2, 2.5, 1, 1.5, 2.5, 2.75});
  const auto same = restrict(f, Subset::full(3));
  CHECK(same.materialize() == f.materialize());
  const auto ham = SetFunction::symmetric({0, 1, 2, 3, 4});
  const auto r2 = restrict(ham, of(4, {1, 3}));
  CHECK(r2.size() == 2);
  CHECK(r2.materialize() == std::vector<double>{0, 1, 1, 2});

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = oracle::random_submodular(5, rng);
    const auto sub = restrict(SetFunction::dense(t), of(5, {0, 2, 4}));
    CHECK(oracle::submodular(sub.materialize(), 3));
  }
}
