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

#include <cmath>
#include <numbers>

#include "phantom/normal.hpp"
#include "phantom/phantom.hpp"
#include "phantom/quadrature.hpp"

using namespace phantom;

namespace {

const double kappa = 0.26 * 0.10;

PhantomCandidate uniform_candidate() {
  return PhantomCandidate("uniform", [](double x) { return std::clamp(x, 0.0, 1.0); });
}

}  // namespace

TEST_SUITE("phantom") {

TEST_CASE("normal helpers") {
  CHECK(normal::cdf(0.0) == 0.5);
  CHECK(normal::quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal::upper_quantile(1e-4) == doctest::Approx(3.719016485455709).epsilon(1e-13));
  CHECK(normal::log_cdf(-38.5) == doctest::Approx(-745.695270290411081329).epsilon(1e-14));
  CHECK(normal::log_cdf(-40.0) == doctest::Approx(-804.608442013753788167).epsilon(1e-14));
  CHECK(normal::log_cdf(-60.0) == doctest::Approx(-1805.01356068056713870).epsilon(1e-14));
  CHECK(normal::log_cdf(-200.0) == doctest::Approx(-20006.2172808981904021).epsilon(1e-14));
  CHECK(normal::log_cdf(9.0) == doctest::Approx(-normal::sf(9.0)).epsilon(1e-12));
  CHECK_THROWS_AS(normal::quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal::upper_quantile(1.0), std::domain_error);
}

TEST_CASE("Gauss-Hermite rule") {
  const auto& rule = quadrature::default_rule();
  CHECK(rule.nodes.size() == 200);
  CHECK(rule.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rule.integrate([](double z) { return z * z; }) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rule.integrate([](double z) { return std::pow(z, 4); }) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(rule.integrate([](double z) { return std::pow(z, 10); }) == doctest::Approx(945.0).epsilon(1e-12));
  CHECK(std::abs(rule.integrate([](double z) { return z * z * z; })) < 1e-12);
  const double e = std::exp(-0.5);
  CHECK(rule.integrate([](double z) { return std::cos(z); }) == doctest::Approx(e).epsilon(1e-14));
  CHECK(quadrature::normal_expectation_adaptive([](double z) { return std::cos(z); }) ==
        doctest::Approx(e).epsilon(1e-12));
  for (std::size_t n : {1, 2, 7, 40}) {
    const auto small = quadrature::gauss_hermite(n);
    CHECK(small.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("empirical law") {
  const EmpiricalLaw law({3.0, 1.0, 2.0, 2.0}, "fixed");
  CHECK(law.replications() == 4);
  CHECK(law.cdf(0.5) == 0.0);
  CHECK(law.cdf(2.0) == 0.75);
  CHECK(law.cdf(3.0) == 1.0);
  CHECK(law.quantile(0.25) == 1.0);
  CHECK(law.quantile(0.26) == 2.0);
  CHECK(law.quantile(0.99) == 3.0);

  const EmpiricalLaw one({0.7}, "one");
  CHECK(one.cdf(0.69) == 0.0);
  CHECK(one.cdf(0.7) == 1.0);
  CHECK_THROWS_AS(EmpiricalLaw({}, "empty"), std::invalid_argument);
}

TEST_CASE("i.i.d. field maxima follow F^4 on a 2x2 block") {
  const int reps = 20000;
  const auto law = empirical_max_law(FieldModel{IidModel{InnovationLaw::uniform()}}, {2, 2}, reps, 41);
  for (double x : {0.5, 0.7, 0.8, 0.9, 0.95}) {
    const double f = std::pow(x, 4);
    CHECK(std::abs(law.cdf(x) - f) <= 3.0 * std::sqrt(f * (1.0 - f) / reps));
  }
}

TEST_CASE("worker count does not change the law") {
  const FieldModel model{IidModel{InnovationLaw::normal()}};
  const auto a = empirical_max_law(model, {6, 6}, 300, 77, 1);
  const auto b = empirical_max_law(model, {6, 6}, 300, 77, 4);
  CHECK(std::vector<double>(a.sorted().begin(), a.sorted().end()) ==
        std::vector<double>(b.sorted().begin(), b.sorted().end()));
}

TEST_CASE("phantom distance") {
  SUBCASE("self distance of a step law") {
    const auto law = empirical_max_law(FieldModel{IidModel{InnovationLaw::normal()}}, {3, 3}, 500, 5);
    CHECK(phantom_distance(law, empirical_candidate(law), 1.0) <= 1.0 / 500);
  }
  SUBCASE("i.i.d. uniform field against the uniform law") {
    for (std::size_t n : {3, 10}) {
      const int reps = 10000;
      const auto law = empirical_max_law(FieldModel{IidModel{InnovationLaw::uniform()}}, {n, n}, reps, 9 + n);
      const auto report = phantom_distance_report(law, uniform_candidate(), static_cast<double>(n * n));
      CHECK(report.distance < 0.03);
      CHECK(report.standard_error <= 0.5 / std::sqrt(reps) + 1e-15);
    }
  }
  SUBCASE("a degenerate candidate is far away") {
    const auto law = empirical_max_law(FieldModel{IidModel{InnovationLaw::uniform()}}, {2, 2}, 100, 3);
    const PhantomCandidate one("one", [](double) { return 1.0; });
    CHECK(phantom_distance(law, one, 4.0) >= 1.0 - 1.0 / 100);
  }
  SUBCASE("the sup is found at a jump") {
    const EmpiricalLaw law({0.5}, "point");
    const auto report = phantom_distance_report(law, uniform_candidate(), 1.0);
    CHECK(report.distance == doctest::Approx(0.5));
    CHECK(report.location == 0.5);
  }
  SUBCASE("closed-form law against its own marginal") {
    for (double n : {5.0, 20.0, 100.0}) {
      const double m = n * n;
      const auto law = [m](double x) { return std::pow(std::clamp(x, 0.0, 1.0), m); };
      CHECK(phantom_distance_exact(law, uniform_candidate(), m, -0.5, 1.5) <= 1e-12);
    }
  }
  SUBCASE("normal candidate keeps precision at huge powers") {
    const auto phi = normal_candidate();
    CHECK(phi.power(6.0, 1e8) == doctest::Approx(std::exp(-1e8 * normal::sf(6.0))).epsilon(1e-10));
    CHECK(phi.power(-50.0, 1e8) == 0.0);
  }
}

TEST_CASE("G_psi") {
  const double gamma = 0.5;
  const auto seq = make_level_sequence(diagonal_curve(2), gamma, 12, [&](const LatticePoint& p, std::uint64_t) {
    return std::pow(gamma, 1.0 / point_product(p));
  });
  const auto g = construct_G_psi(seq);
  for (std::size_t i = 0; i < seq.levels.size(); ++i) {
    CHECK(g.power(seq.levels[i], seq.sizes[i]) == gamma);
  }
  CHECK(g(std::nextafter(seq.levels[0], 0.0)) == 0.0);
  CHECK(g(seq.levels[0]) == gamma);
  CHECK(g(std::nextafter(seq.levels[1], 0.0)) == gamma);
  CHECK(g(seq.levels[1]) == doctest::Approx(std::pow(gamma, 0.25)).epsilon(1e-15));
  CHECK(g(seq.levels.back()) == doctest::Approx(std::pow(gamma, 1.0 / 144.0)).epsilon(1e-15));
  CHECK(g(std::nextafter(seq.levels.back(), 2.0)) == 1.0);
  CHECK(g(2.0) == 1.0);
  CHECK(g.jumps().size() == seq.levels.size());

  const auto smooth = construct_G_psi(seq, true);
  CHECK(smooth.name().find("non-step") != std::string::npos);
  const double mid = 0.5 * (seq.levels[2] + seq.levels[3]);
  CHECK(smooth(mid) > g(seq.levels[2]));
  CHECK(smooth(mid) < g(seq.levels[3]));
}

TEST_CASE("level repair") {
  const auto seq = make_level_sequence(diagonal_curve(2), 0.5, 6, [](const LatticePoint& p, std::uint64_t) {
    return p[0] == 4 ? 0.1 : static_cast<double>(p[0]);
  });
  CHECK(seq.repaired_at == std::vector<std::uint64_t>{4});
  CHECK(seq.raw_levels[3] == 0.1);
  CHECK(seq.levels[3] == 3.0);
  for (std::size_t i = 1; i < seq.levels.size(); ++i) CHECK(seq.levels[i] >= seq.levels[i - 1]);

  LevelSequence bad = seq;
  bad.levels[3] = 0.1;
  CHECK_THROWS_AS(construct_G_psi(bad), std::invalid_argument);
}

TEST_CASE("estimated levels on an i.i.d. field") {
  const double gamma = std::exp(-1.0);
  const std::size_t reps = 4000;
  const auto seq =
      estimate_level_sequence(FieldModel{IidModel{InnovationLaw::uniform()}}, diagonal_curve(2), gamma, 8, reps, 19);
  REQUIRE(seq.levels.size() == 8);
  for (std::size_t i = 0; i < seq.levels.size(); ++i) {
    const double f = std::pow(seq.raw_levels[i], seq.sizes[i]);
    CHECK(std::abs(f - gamma) <= 4.0 * std::sqrt(gamma * (1 - gamma) / reps) + 1.0 / reps);
  }
  const auto g = construct_G_psi(seq);
  for (std::size_t i = 0; i < seq.levels.size(); ++i) CHECK(g.power(seq.levels[i], seq.sizes[i]) == gamma);

  const auto noisy =
      estimate_level_sequence(FieldModel{IidModel{InnovationLaw::normal()}}, diagonal_curve(1), 0.99, 40, 3, 2);
  CHECK_FALSE(noisy.repaired_at.empty());
}

TEST_CASE("levels_u") {
  CHECK(levels_u(50.0, 10) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(levels_u(1.0, 100) == doctest::Approx(3.719016485455709).epsilon(1e-13));
  CHECK(levels_u(1.0, 20) == doctest::Approx(2.8070337683438041172).epsilon(1e-14));
  CHECK(levels_u(1.0, 80) == doctest::Approx(3.6047113948643735835).epsilon(1e-14));
  const double ratio = levels_u(1.0, 1'000'000) / std::sqrt(4.0 * std::log(1e6));
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
  CHECK_THROWS_AS(levels_u(0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(levels_u(100.0, 10), std::invalid_argument);
}

TEST_CASE("normalizers") {
  CHECK(normalizers(3.0).a == doctest::Approx(std::sqrt(2.0 * std::log(3.0))).epsilon(1e-15));
  const double a16 = std::sqrt(2.0 * std::log(16.0));
  CHECK(normalizers(16.0).b ==
        doctest::Approx(a16 - (std::log(std::log(16.0)) + std::log(4.0 * std::numbers::pi)) / (2.0 * a16)));
  CHECK(normalizers(1e4).b == doctest::Approx(3.7384108184200114556).epsilon(1e-14));
  double prev = 0.0;
  for (double n = 3.0; n < 1e9; n *= 1.7) {
    CHECK(normalizers(n).a > prev);
    prev = normalizers(n).a;
  }
  CHECK_THROWS_AS(normalizers(2.0), std::invalid_argument);
}

TEST_CASE("limit H") {
  CHECK(limit_H(20.0, 1.0) >= 1.0 - 1e-6);
  CHECK(std::abs(limit_H(0.0, 1e-8) - gumbel_H0(0.0)) <= 1e-4);
  CHECK(limit_H(0.0, kappa) == doctest::Approx(0.37731915890913546485).epsilon(1e-13));
  CHECK(limit_H(1.0, kappa) == doctest::Approx(0.69465641533740745888).epsilon(1e-13));
  CHECK(limit_H(-1.0, kappa) == doctest::Approx(0.078435330493716047017).epsilon(1e-12));
  CHECK(std::abs(limit_H(0.0, kappa) - limit_H_adaptive(0.0, kappa)) <= 1e-8);
  CHECK(gumbel_H0(0.0) == doctest::Approx(std::exp(-1.0)));
  double prev = 0.0;
  for (double x = -6.0; x <= 12.0; x += 0.25) {
    const double h = limit_H(x, kappa);
    CHECK(h >= prev);
    CHECK(h <= 1.0);
    prev = h;
  }
}

TEST_CASE("equicorrelated max law") {
  CHECK(equicorrelated_max_cdf(37.0, 0.0, 1.8) == doctest::Approx(std::pow(normal::cdf(1.8), 37)).epsilon(1e-13));
  CHECK(equicorrelated_max_cdf(1.0, 0.4, 0.3) == doctest::Approx(normal::cdf(0.3)).epsilon(1e-13));

  const double expected[] = {0.40365311647952595247, 0.40084219491613360902, 0.39870175143399379077,
                             0.39700592901258038940, 0.39562031947210994125};
  double n = 1e4;
  for (double e : expected) {
    const Normalizers nz = normalizers(n);
    const double rho = kappa / std::log(n);
    CHECK(equicorrelated_max_cdf(n, rho, nz.b) == doctest::Approx(e).epsilon(1e-12));
    CHECK(std::abs(equicorrelated_max_cdf(n, rho, nz.b) - equicorrelated_max_cdf_adaptive(n, rho, nz.b)) <= 1e-8);
    n *= 10.0;
  }

  double prev = 0.0;
  for (double w = -2.0; w <= 8.0; w += 0.1) {
    const double p = equicorrelated_max_cdf(1e6, 0.01, w);
    CHECK(p >= prev);
    CHECK(p <= 1.0);
    prev = p;
  }
  CHECK_THROWS_AS(equicorrelated_max_cdf(10.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("extremal index") {
  CHECK(extremal_index(0.3, 0.3) == 1.0);
  CHECK(extremal_index(0.5, 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  for (double s : {0.1, 0.7, 2.0, 5.0}) {
    CHECK(extremal_index(std::pow(0.6, s), std::pow(0.2, s)) == doctest::Approx(extremal_index(0.6, 0.2)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(extremal_index(0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(extremal_index(1.0, 0.5), std::domain_error);

  const MovingMaxModel mm{{2, 2}, InnovationLaw::uniform()};
  const auto w = moving_max_extremal_index(mm, {200, 200}, 0.5);
  CHECK(w.theta == doctest::Approx(201.0 * 201.0 / (4.0 * 200.0 * 200.0)).epsilon(1e-9));
  CHECK(std::abs(w.theta - 0.25) <= 0.02);
  CHECK(w.gamma_in == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("solve_level") {
  const double x = solve_level([](double v) { return normal::cdf(v); }, 0.975, -10.0, 10.0);
  CHECK(x == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK_THROWS_AS(solve_level([](double v) { return v; }, 0.5, 1.0, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
