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

#include "bdloss/decomp.hpp"
#include "bdloss/losses.hpp"
#include "oracles.hpp"

using namespace bdloss;

namespace {

using L = std::vector<int>;

L labeling(int p, std::uint64_t code) {
  L y(p);
  for (int j = 0; j < p; ++j) y[j] = (code >> j) & 1 ? 1 : -1;
  return y;
}

// Dice loss of a prediction with n false negatives and fp false positives,
// evaluated on explicit labelings.
double dice_counts(int m, int p_neg, int n, int fp) {
  L y(m + p_neg, -1), yt(m + p_neg, -1);
  for (int j = 0; j < m; ++j) {
    y[j] = 1;
    yt[j] = j < m - n ? 1 : -1;
  }
  for (int j = 0; j < fp; ++j) yt[m + j] = 1;
  return oracle::dice_direct(y, yt);
}

}  // namespace

TEST_CASE("dice examples") {
  CHECK(dice_loss(L{1, -1, 1}, L{1, -1, 1}) == 0.0);
  CHECK(dice_loss(L{-1, 1, 1, -1}, L{-1, -1, 1, 1}) == doctest::Approx(0.5));
  CHECK(dice_value(10, 1, 8) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(dice_loss(L{-1, -1}, L{1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(dice_as_setfn(L{-1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(dice_loss(L{1, -1}, L{1}), std::invalid_argument);
}

TEST_CASE("dice symmetry, range and set-function isomorphism") {
  for (int p = 1; p <= 8; ++p) {
    for (std::uint64_t yc = 1; yc < (std::uint64_t{1} << p); yc += (p > 5 ? 7 : 1)) {
      const auto y = labeling(p, yc);
      const auto f = dice_as_setfn(y);
      CHECK(f.repr() == Repr::kFpFn);
      for (std::uint64_t tc = 0; tc < (std::uint64_t{1} << p); ++tc) {
        const auto yt = labeling(p, tc);
        const double d = dice_loss(y, yt);
        const double ref = oracle::dice_direct(y, yt);
        CHECK(d == doctest::Approx(ref).epsilon(1e-14));
        CHECK(f(mistake_set(y, yt)) == doctest::Approx(ref).epsilon(1e-14));
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        if (tc != 0) CHECK(dice_loss(yt, y) == doctest::Approx(d).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("dice grid and structure") {
  const auto g = dice_grid(3, 3);
  CHECK(g.at(0, 0) == 0.0);
  CHECK(g.at(3, 0) == doctest::Approx(1.0));
  const auto r = check_structure(dice_as_setfn(L{1, 1, 1, -1, -1, -1}));
  CHECK_FALSE(r.is_submodular);
  CHECK_FALSE(r.is_supermodular);
  CHECK_FALSE(r.submodular_witnesses.empty());
  CHECK_FALSE(r.supermodular_witnesses.empty());
}

TEST_CASE("dice gain curves are first differences of the loss") {
  const auto c = dice_gain_curves(10, 8, 5);
  REQUIRE(c.n_a.size() == 8);
  for (std::size_t k = 0; k < c.n_a.size(); ++k) {
    const int n = c.n_a[k];
    CHECK(c.a[k] == doctest::Approx(dice_counts(10, 8, n + 1, 8) - dice_counts(10, 8, n, 8)).epsilon(1e-12));
    CHECK(c.b[k] == doctest::Approx(dice_counts(10, 8, n, 5) - dice_counts(10, 8, n - 1, 5)).epsilon(1e-12));
  }
  CHECK(c.b.front() == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(c.b.back() == doctest::Approx(30.0 / (17 * 18)).epsilon(1e-9));
  CHECK(c.a.front() - c.b.front() > 0.0);
  CHECK(c.a.back() - c.b.back() < 0.0);
}

TEST_CASE("dice restricted to false negatives is neither sub- nor supermodular") {
  // Nested witness pair: B = A + one false negative and extra false positives.
  const auto c = dice_gain_curves(10, 8, 5);
  bool up = false, down = false;
  for (std::size_t k = 0; k < c.n_a.size(); ++k) {
    up = up || c.a[k] > c.b[k];
    down = down || c.a[k] < c.b[k];
  }
  CHECK(up);
  CHECK(down);
  for (int p_neg : {5, 8}) {
    // Fix fp and vary only false negatives: the profile n -> c(n, fp).
    std::vector<double> prof(11);
    for (int n = 0; n <= 10; ++n) prof[n] = dice_value(10, n, p_neg) - dice_value(10, 0, p_neg);
    const auto r = check_structure(SetFunction::symmetric(prof));
    // Convex in n: only supermodular in the false negatives alone.
    CHECK(r.is_supermodular);
    const auto full = check_structure(dice_as_setfn([&] {
      L y(10 + p_neg, -1);
      for (int j = 0; j < 10; ++j) y[j] = 1;
      return y;
    }()), {kStructureTol, 18, 4});
    CHECK_FALSE(full.is_submodular);
    CHECK_FALSE(full.is_supermodular);
  }
}

TEST_CASE("track loss examples") {
  const auto d3 = delta_k(3, 10);
  CHECK(d3.fn.profile()[2] == doctest::Approx(0.0));
  CHECK(d3.fn.profile()[5] == doctest::Approx(5.0 / 3.0));
  CHECK(d3.fn.profile()[9] == doctest::Approx(10.0 / 3.0));
  const auto d4 = delta_k(4, 10);
  CHECK(d4.alpha == 0.5);
  CHECK(d4.fn.profile()[4] == doctest::Approx(0.5));
  CHECK(delta_k(2, 10).alpha == 2.0);
  for (int k = 1; k <= 4; ++k) {
    const auto loss = delta_k(k, 10);
    const auto r = check_structure(loss.fn);
    CHECK_FALSE(r.is_submodular);
    CHECK_FALSE(r.is_supermodular);
    for (double v : loss.fn.profile()) CHECK(v >= 0.0);
  }
  CHECK(delta_k(3, 10).fn.profile()[1] == 0.0);
  CHECK(delta_k(4, 10).fn.profile()[1] == 0.0);

  LossParams raw;
  raw.clamp = 0;
  CHECK(delta_k(1, 10, raw).fn.profile()[1] == doctest::Approx(1.0 - 10.0 / 3.0));
  LossParams norm;
  norm.normalize = true;
  CHECK(delta_k(3, 10, norm).fn.profile()[9] == doctest::Approx(1.0 / 3.0));
  LossParams bad;
  bad.alpha = -1.0;
  CHECK_THROWS_AS(delta_k(2, 10, bad), std::invalid_argument);
}

TEST_CASE("hamming") {
  const auto h = hamming(4);
  CHECK(h.fn.at_mask(0) == 0.0);
  CHECK(h.fn.at_mask(0b1011) == 3.0);
  CHECK(check_structure(h.fn).is_modular);
  CHECK(h(L{1, 1, -1, -1}, L{-1, 1, 1, -1}) == 2.0);
}

TEST_CASE("loss family caches by structure and relabels Dice") {
  LossFamily fam(LossConfig{LossKind::kDice, {}});
  const L y1{1, -1, 1, -1, -1}, y2{-1, 1, -1, -1, 1}, y3{1, 1, 1, -1, -1};
  const auto d1 = fam.decomposition(y1);
  const auto d2 = fam.decomposition(y2);
  CHECK(fam.cached() == 1);
  fam.decomposition(y3);
  CHECK(fam.cached() == 2);
  for (const auto& [y, d] : {std::pair{y1, d1}, std::pair{y2, d2}}) {
    const auto l = fam.loss(y).fn;
    const auto c = verify_decomposition(d, l);
    CHECK(c.additivity_residual <= 1e-12);
    CHECK(c.ok());
  }
  LossFamily tracks(LossConfig{LossKind::kDelta1, {}});
  tracks.decomposition(L{1, 1, 1});
  tracks.decomposition(L{-1, -1, 1});
  CHECK(tracks.cached() == 1);
  CHECK(parse_loss_kind("delta4") == LossKind::kDelta4);
  CHECK_THROWS_AS(parse_loss_kind("jaccard"), std::invalid_argument);
}
