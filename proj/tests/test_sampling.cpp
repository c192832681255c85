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

#include <algorithm>
#include <array>
#include <cmath>

#include "phantom/normal.hpp"
#include "phantom/phantom.hpp"
#include "phantom/sampling.hpp"
#include "support.hpp"

using namespace phantom;
using phantom::testing::example;

namespace {

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("single cell is standard normal") {
  const FieldSampler sampler(FieldModel{GaussianSeparableModel{example()}}, {1, 1});
  const int reps = 100000;
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double x = sampler.draw(substream_seed(3, r)).values[0];
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / reps) <= 4.0 / std::sqrt(reps));
  CHECK(sq / reps == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("neighbour correlation along the first axis is eta1(1)") {
  const FieldSampler sampler(FieldModel{GaussianSeparableModel{example()}}, {2, 1});
  const int reps = 100000;
  double sxy = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto s = sampler.draw(substream_seed(5, r));
    sxy += s.values[0] * s.values[1];
  }
  CHECK(std::abs(sxy / reps - example().axis(0)(1.0)) <= 0.01);
}

TEST_CASE("pairwise covariances of a 3x3 field") {
  const auto& c = example();
  const FieldSampler sampler(FieldModel{GaussianSeparableModel{c}}, {3, 3});
  const int reps = 100000;
  std::vector<double> acc(81, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto s = sampler.draw(substream_seed(17, r));
    for (int a = 0; a < 9; ++a) {
      for (int b = 0; b < 9; ++b) acc[a * 9 + b] += s.values[a] * s.values[b];
    }
  }
  int outside = 0;
  for (int a = 0; a < 9; ++a) {
    for (int b = 0; b < 9; ++b) {
      const std::array<std::int64_t, 2> lag{a / 3 - b / 3, a % 3 - b % 3};
      const double r = covariance_at(c, lag);
      const double se = std::sqrt((1.0 + r * r) / reps);
      if (std::abs(acc[a * 9 + b] / reps - r) > 5.0 * se) ++outside;
    }
  }
  CHECK(outside == 0);
}

TEST_CASE("identical seeds give identical fields") {
  const FieldSampler sampler(FieldModel{GaussianSeparableModel{example()}}, {7, 5});
  const auto a = sampler.draw(99);
  const auto b = sampler.draw(99);
  CHECK(a.values == b.values);
  CHECK(sampler.draw(100).values != a.values);
  CHECK(sample_gaussian_separable(example(), {7, 5}, 99).values == a.values);
}

TEST_CASE("a constant polygon cannot be factorized") {
  const CharacteristicPolygon flat({{0, 1}, {1, 1}});
  const SeparableCovariance c({flat, flat});
  try {
    FieldSampler sampler(FieldModel{GaussianSeparableModel{c}}, {4, 4});
    FAIL("expected a factorization error");
  } catch (const FactorizationError& e) {
    CHECK(e.minor() == 2);
    CHECK(e.axis() == 0);
  }
}

TEST_CASE("toeplitz factor reproduces the Toeplitz matrix") {
  const auto& eta = example().axis(0);
  const Eigen::MatrixXd l = toeplitz_factor(eta, 40);
  const Eigen::MatrixXd t = l * l.transpose();
  double worst = 0.0;
  for (int a = 0; a < 40; ++a) {
    for (int b = 0; b < 40; ++b) worst = std::max(worst, std::abs(t(a, b) - eta(static_cast<double>(a - b))));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("block maxima are stationary") {
  const FieldSampler sampler(FieldModel{GaussianSeparableModel{example()}}, {6, 6});
  const int reps = 20000;
  std::vector<double> a, b;
  for (int r = 0; r < reps; ++r) {
    const auto s = sampler.draw(substream_seed(23, r));
    a.push_back(block_max(s, Rectangle{{1, 1}, {2, 3}}));
    b.push_back(block_max(s, Rectangle{{4, 3}, {5, 5}}));
  }
  // 1% critical value of the two-sample Kolmogorov-Smirnov statistic.
  CHECK(ks_two_sample(a, b) < 1.63 * std::sqrt(2.0 / reps));
}

TEST_CASE("equicorrelated max") {
  const int reps = 100000;
  SUBCASE("rho = 0 is the max of independent normals") {
    int hits = 0;
    for (int r = 0; r < reps; ++r) hits += sample_equicorrelated_max(50, 0.0, substream_seed(1, r)) <= 2.0;
    const double p = std::pow(normal::cdf(2.0), 50);
    CHECK(std::abs(static_cast<double>(hits) / reps - p) <= 4.0 * std::sqrt(p * (1 - p) / reps));
  }
  SUBCASE("N = 1 is standard normal") {
    int hits = 0;
    for (int r = 0; r < reps; ++r) hits += sample_equicorrelated_max(1, 0.7, substream_seed(2, r)) <= 0.5;
    const double p = normal::cdf(0.5);
    CHECK(std::abs(static_cast<double>(hits) / reps - p) <= 4.0 * std::sqrt(p * (1 - p) / reps));
  }
  SUBCASE("matches the quadrature law") {
    int hits = 0;
    for (int r = 0; r < reps; ++r) hits += sample_equicorrelated_max(100, 0.1, substream_seed(4, r)) <= 2.5;
    CHECK(std::abs(static_cast<double>(hits) / reps - equicorrelated_max_cdf(100, 0.1, 2.5)) <= 0.01);
  }
  CHECK_THROWS_AS(sample_equicorrelated_max(0, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_equicorrelated_max(10, 1.0, 1), std::invalid_argument);
}

TEST_CASE("moving maxima") {
  const MovingMaxModel mm{{2, 2}, InnovationLaw::uniform()};
  SUBCASE("unit window is the i.i.d. field") {
    const MovingMaxModel unit{{1, 1}, InnovationLaw::uniform()};
    CHECK(sample_moving_max({1, 1}, InnovationLaw::uniform(), {4, 3}, 8).values ==
          sample_iid(InnovationLaw::uniform(), {4, 3}, 8).values);
    const std::array<std::size_t, 2> n{4, 3};
    CHECK(moving_max_block_cdf(unit, n, 0.9) == doctest::Approx(std::pow(0.9, 12)));
  }
  SUBCASE("closed-form block law") {
    const std::array<std::size_t, 2> n{5, 5};
    CHECK(moving_max_block_cdf(mm, n, 0.97) == doctest::Approx(std::pow(0.97, 36)).epsilon(1e-14));
    const std::array<std::size_t, 2> one{1, 1};
    CHECK(moving_max_block_cdf(mm, one, 0.8) == doctest::Approx(std::pow(0.8, 4)));
    CHECK(FieldModel{mm}.marginal_cdf(0.8) == doctest::Approx(std::pow(0.8, 4)));
  }
  SUBCASE("Monte Carlo agrees with the closed form") {
    const int reps = 20000;
    const FieldSampler sampler(FieldModel{mm}, {5, 5});
    std::vector<double> maxima;
    for (int r = 0; r < reps; ++r) maxima.push_back(sampler.draw(substream_seed(31, r)).max());
    const EmpiricalLaw law(maxima, "moving max");
    const std::array<std::size_t, 2> n{5, 5};
    for (double x : {0.9, 0.95, 0.97, 0.98, 0.99}) {
      const double f = moving_max_block_cdf(mm, n, x);
      CHECK(std::abs(law.cdf(x) - f) <= 3.0 * std::sqrt(f * (1 - f) / reps) + 1e-12);
    }
  }
  SUBCASE("each entry is the max over its window") {
    const auto s = sample_moving_max({2, 2}, InnovationLaw::two_point(0.4), {3, 3}, 12);
    for (double v : s.values) CHECK((v == 0.0 || v == 1.0));
  }
}

TEST_CASE("innovation laws") {
  CHECK_THROWS_AS(InnovationLaw::discrete({0, 1}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(InnovationLaw::discrete({1, 0}, {0.5, 0.5}), std::invalid_argument);
  const auto two = InnovationLaw::two_point(0.3);
  CHECK(two.cdf(-0.1) == 0.0);
  CHECK(two.cdf(0.0) == doctest::Approx(0.7));
  CHECK(two.cdf(1.0) == 1.0);
  CHECK(InnovationLaw::uniform().cdf(0.25) == 0.25);
  CHECK(InnovationLaw::normal().cdf(0.0) == 0.5);
}

TEST_CASE("sampler input errors") {
  CHECK_THROWS_AS(FieldSampler(FieldModel{GaussianSeparableModel{example()}}, {3}), std::invalid_argument);
  CHECK_THROWS_AS(FieldSampler(FieldModel{GaussianSeparableModel{example()}}, {3, 0}), std::invalid_argument);
  CHECK_THROWS_AS(FieldSampler(FieldModel{MovingMaxModel{{0, 2}, InnovationLaw::uniform()}}, {3, 3}),
                  std::invalid_argument);
}

}  // TEST_SUITE
