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

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace phantom {

/// Knots beyond this abscissa are evaluated through the closed form.
inline constexpr std::size_t kDefaultPolygonHorizon = 1'000'000;

struct Knot {
  double t;
  double v;
};

/// How a polygon continues past its last stored knot.
///  - kFlat: constant at the last knot value.
///  - kLogLogOverLog: scale * ln(ln k) / ln k at integers k, linear in between.
///  - kInverseLog: scale / ln k at integers k, linear in between.
struct TailRule {
  enum class Kind { kFlat, kLogLogOverLog, kInverseLog };
  Kind kind = Kind::kFlat;
  double scale = 0.0;

  /// Closed-form value at an integer abscissa k past the horizon.
  double at_integer(double k) const;
};

/// A Polya-type characteristic function: even, piecewise linear on R+,
/// given by its knots and a tail rule. Immutable; copies share storage.
class CharacteristicPolygon {
 public:
  /// Abscissae must be nonnegative and strictly increasing. Values are not
  /// checked here; see validate_polya.
  explicit CharacteristicPolygon(std::vector<Knot> knots, TailRule tail = {});

  double operator()(double t) const;

  std::span<const Knot> knots() const { return *knots_; }
  const TailRule& tail() const { return tail_; }
  double last_abscissa() const { return knots_->back().t; }

 private:
  std::shared_ptr<const std::vector<Knot>> knots_;
  TailRule tail_;
};

struct PolyaReport {
  bool valid = true;
  /// Violated conditions, first one first. Empty when valid.
  std::vector<std::string> diagnostics;

  explicit operator bool() const { return valid; }
};

/// Checks value 1 at the origin, positivity, monotone decrease and
/// convexity (nondecreasing slopes) on the stored knots and across the
/// junction with the tail. Slope comparisons are exact.
PolyaReport validate_polya(const CharacteristicPolygon& polygon);

/// gamma1 * ln(ln k) / ln k.
double eta1_closed_form(double gamma1, double k);
/// gamma2 / ln k.
double eta2_closed_form(double gamma2, double k);

/// Knots (0,1), (1, gamma1 (27 f(27) - 26 f(28))), (k, gamma1 f(k)) for
/// 28 <= k <= horizon, f(k) = ln(ln k)/ln k. Throws std::invalid_argument on
/// gamma1 outside (0,1) or an infeasible polygon.
CharacteristicPolygon build_eta1(double gamma1, std::size_t horizon = kDefaultPolygonHorizon);

/// Knots (0,1), (1, gamma2 (2/ln 2 - 1/ln 3)), (k, gamma2/ln k) for
/// 3 <= k <= horizon.
CharacteristicPolygon build_eta2(double gamma2, std::size_t horizon = kDefaultPolygonHorizon);

struct GammaPair {
  double gamma1 = 0.26;
  double gamma2 = 0.10;
};

/// gamma1 > 1/4 and
/// gamma1 (27 f(27) - 26 f(28)) < gamma2 (2/ln 2 - 1/ln 3) < (1 - 2 gamma1)/(1 + 2 gamma1).
bool validate_gammas(const GammaPair& g);

/// (1 - 2 gamma1)/(1 + 2 gamma1), the ceiling on the covariance supremum.
double delta_threshold(double gamma1);

}  // namespace phantom
