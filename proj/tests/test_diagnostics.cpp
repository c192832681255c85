// Copyright 2026 The phantom-fields Authors
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

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "phantom/diagnostics.hpp"
#include "phantom/normal.hpp"
#include "support.hpp"

using namespace phantom;
using phantom::testing::example;

namespace {

const MovingMaxModel kTwoAtom{{2, 2}, InnovationLaw::two_point(0.3)};

std::size_t nonempty_blocks(const BlockSplit& s) {
  std::size_t count = 0;
  for (const auto& b : s.blocks()) count += !b.empty();
  return count;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("splits") {
  CHECK(split_bound({10, 7}, 0.5) == Dims{5, 3});
  CHECK_THROWS_AS(split_bound({10, 7}, 0.0), std::invalid_argument);
  CHECK(all_splits({3, 3}, 2).size() == 100);
  CHECK(all_splits({2}, 3).size() == 10);
  CHECK(default_split_grid({8, 8}).size() == 15 * 15);
  for (const auto& s : all_splits({3, 2}, 3)) {
    CHECK(s.k() == 3);
    CHECK(s.total()[0] <= 3);
    CHECK(s.total()[1] <= 2);
    CHECK(s.blocks().size() == 9);
  }
  const BlockSplit s{{{2, 1}, {1, 3}}};
  const auto blocks = s.blocks();
  CHECK(blocks[3].lo == LatticePoint{3, 2});
  CHECK(blocks[3].hi == LatticePoint{3, 4});
}

TEST_CASE("a zero part merges blocks") {
  const BlockSplit s{{{0, 2}, {3, 1}}};
  CHECK(nonempty_blocks(s) == 2);
  const BlockSplit t{{{0, 0}, {3, 1}}};
  CHECK(nonempty_blocks(t) == 1);
  const auto prob = exact_block_probability(FieldModel{kTwoAtom}, 0.0);
  CHECK(beta_from_probabilities({t}, prob).value == 0.0);
}

TEST_CASE("independent fields have beta zero") {
  const FieldModel iid{IidModel{InnovationLaw::uniform()}};
  const auto prob = exact_block_probability(iid, 0.93);
  for (std::size_t k : {2, 3}) {
    const auto report = beta_from_probabilities(all_splits({4, 4}, k), prob);
    CHECK(report.value <= 1e-15);
  }
  const auto mc = beta_estimate(iid, {6, 6}, 0.97, 1.0, default_split_grid({6, 6}), 4000, 3);
  CHECK(mc.value <= 3.0 * mc.standard_error);
}

TEST_CASE("enumeration agrees with the closed form") {
  const MovingMaxEnumeration e(kTwoAtom, {3, 3}, 0.0);
  CHECK(e.sites() == 16);
  const auto exact = exact_block_probability(FieldModel{kTwoAtom}, 0.0);
  for (const auto& s : all_splits({3, 3}, 2)) {
    for (const auto& b : s.blocks()) CHECK(e.probability(b) == doctest::Approx(exact(b)).epsilon(1e-13));
  }
  CHECK(e.probability(Rectangle{{2, 2}, {3, 3}}) == doctest::Approx(std::pow(0.7, 9)).epsilon(1e-14));
  CHECK_THROWS_AS(MovingMaxEnumeration(MovingMaxModel{{2, 2}, InnovationLaw::uniform()}, {2, 2}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(MovingMaxEnumeration(kTwoAtom, {5, 5}, 0.0), std::invalid_argument);
}

TEST_CASE("Monte Carlo beta matches enumeration at a fixed split") {
  const MovingMaxEnumeration e(kTwoAtom, {3, 3}, 0.0);
  const auto exact = beta_from_probabilities(all_splits({3, 3}, 2), e.as_function());
  REQUIRE(exact.argmax.has_value());
  CHECK(exact.value > 0.0);
  const auto mc = beta_estimate(FieldModel{kTwoAtom}, {3, 3}, 0.0, 1.0, {*exact.argmax}, 20000, 8);
  CHECK(std::abs(mc.value - exact.value) <= 3.0 * mc.standard_error);
}

TEST_CASE("k = 2 is the two-block functional") {
  const FieldModel model{kTwoAtom};
  const auto splits = all_splits({3, 2}, 2);
  const auto a = beta_estimate(model, {3, 2}, 0.0, 1.0, splits, 2000, 4);
  const auto b = beta_k_estimate(model, {3, 2}, 0.0, 1.0, 2, splits, 2000, 4);
  CHECK(a.value == b.value);
  CHECK(a.standard_error == b.standard_error);
  CHECK_THROWS_AS(beta_k_estimate(model, {3, 2}, 0.0, 1.0, 1, splits, 10, 4), std::invalid_argument);
  CHECK_THROWS_AS(beta_estimate(model, {3, 2}, 0.0, 0.5, splits, 10, 4), std::invalid_argument);
}

TEST_CASE("beta is reproducible across workers") {
  const FieldModel model{GaussianSeparableModel{example()}};
  const auto grid = default_split_grid({8, 8});
  const auto a = beta_estimate(model, {8, 8}, 1.5, 1.0, grid, 500, 12, 1);
  const auto b = beta_estimate(model, {8, 8}, 1.5, 1.0, grid, 500, 12, 3);
  CHECK(a.value == b.value);
  CHECK(a.argmax->parts == b.argmax->parts);
}

TEST_CASE("block growth on enumerable instances") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> p(0.05, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    const MovingMaxModel mm{{2, 2}, InnovationLaw::two_point(p(rng))};
    const MovingMaxEnumeration e(mm, {3, 3}, 0.0);
    for (std::size_t k : {2, 3}) {
      const auto check = check_block_growth(e.as_function(), {3, 3}, k);
      CHECK(check.holds);
      CHECK(check.bound == doctest::Approx(static_cast<double>(k * k) * check.beta2));
    }
  }
}

TEST_CASE("L rule") {
  LRule standard;
  CHECK(standard.evaluate(0.0) == doctest::Approx(1.0 / (2.0 * std::acos(-1.0))));
  CHECK_THROWS_AS(standard.evaluate(1.0), std::invalid_argument);
  LRule constant{LRule::Kind::kConstant, 0.4};
  CHECK(constant.evaluate(0.9) == 0.4);
  CHECK(constant.describe().find("constant") != std::string::npos);
}

TEST_CASE("Berman bound") {
  const auto& c = example();
  SUBCASE("n = 1 sums three offsets") {
    const double u = 2.0;
    const double e1 = c.axis(0)(1.0), e2 = c.axis(1)(1.0);
    const auto term = [u](double r) { return r * std::exp(-u * u / (1.0 + r)); };
    const auto r = berman_bound(c, 1, u);
    CHECK(r.sum == doctest::Approx(term(e1) + term(e2) + term(e1 * e2)).epsilon(1e-15));
    CHECK(r.bound == doctest::Approx(4.0 * r.l_value * r.sum).epsilon(1e-15));
  }
  SUBCASE("oracle at n = 5") {
    const auto r = berman_bound(c, 5, levels_u(1.0, 5));
    CHECK(r.delta == doctest::Approx(0.19751508551510894211).epsilon(1e-14));
    CHECK(r.alpha == doctest::Approx(0.17012509837377424551).epsilon(1e-13));
    CHECK(r.l_value == doctest::Approx(0.16235332842189527721).epsilon(1e-13));
    CHECK(r.sigma1 == doctest::Approx(0.0069771587884297971580).epsilon(1e-12));
    CHECK(r.sigma2 == doctest::Approx(0.074946779251363255493).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(1.3300624018189521079).epsilon(1e-12));
  }
  SUBCASE("direct and factored routes agree") {
    for (std::uint64_t n : {1, 7, 20, 80}) {
      const double u = levels_u(1.0, n == 1 ? 2 : n);
      const auto a = berman_bound(c, n, u);
      const auto b = berman_bound_factored(c, n, u);
      CHECK(std::abs(a.bound - b.bound) <= 1e-10);
      CHECK(std::abs(a.sigma1 - b.sigma1) <= 1e-12);
    }
  }
  SUBCASE("partition") {
    const auto r = berman_bound(c, 30, 3.0);
    CHECK(r.sigma1 + r.sigma2 == doctest::Approx(r.sum).epsilon(1e-15));
    CHECK(r.sigma1 > 0.0);
    CHECK(r.sigma2 > 0.0);
  }
  SUBCASE("monotone in u and n") {
    double prev = std::numeric_limits<double>::infinity();
    for (double u = 0.5; u < 12.0; u += 0.5) {
      const double b = berman_bound(c, 15, u).bound;
      CHECK(b <= prev);
      prev = b;
    }
    CHECK(prev < 1e-12);
    prev = 0.0;
    for (std::uint64_t n = 1; n < 40; n += 3) {
      const double b = berman_bound(c, n, 3.0).bound;
      CHECK(b >= prev);
      prev = b;
    }
  }
  SUBCASE("explicit alpha and an empty admissible interval") {
    CHECK(berman_bound(c, 10, 3.0, {}, 0.5).alpha == 0.5);
    const CharacteristicPolygon strong({{0, 1}, {1, 0.5}, {2, 0.25}});
    const SeparableCovariance s({strong, strong});
    const auto r = berman_bound(s, 10, 3.0);
    CHECK(std::isnan(r.alpha));
    CHECK(r.sigma1 == 0.0);
  }
}

TEST_CASE("bound against Monte Carlo") {
  SUBCASE("i.i.d. normal field") {
    const auto check = bound_vs_empirical(FieldModel{IidModel{InnovationLaw::normal()}}, 10, 2.8, 4000, 6);
    CHECK(check.bound == 0.0);
    CHECK(check.gap <= 3.0 * check.standard_error);
    CHECK(check.verdict);
  }
  SUBCASE("a level below every sample") {
    const auto check = bound_vs_empirical(FieldModel{GaussianSeparableModel{example()}}, 20, 0.01, 200, 6);
    CHECK(check.empirical == 0.0);
    CHECK(check.gap < 1e-100);
    CHECK(check.verdict);
  }
  SUBCASE("example field") {
    const auto check =
        bound_vs_empirical(FieldModel{GaussianSeparableModel{example()}}, 20, levels_u(1.0, 20), 1000, 6);
    CHECK(check.verdict);
  }
  SUBCASE("errors") {
    const EmpiricalLaw law({1.0, 2.0}, "tiny", {3, 4});
    CHECK_THROWS_AS(bound_vs_empirical(law, FieldModel{GaussianSeparableModel{example()}}, 3, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(bound_vs_empirical(FieldModel{IidModel{InnovationLaw::uniform()}}, 5, 2.0, 10, 1),
                    std::invalid_argument);
  }
}

}  // TEST_SUITE
