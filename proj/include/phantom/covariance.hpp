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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "phantom/polygon.hpp"

namespace phantom {

using LatticePoint = std::vector<std::int64_t>;

/// r(k) = prod_i axes[i](k_i) on Z^d.
class SeparableCovariance {
 public:
  explicit SeparableCovariance(std::vector<CharacteristicPolygon> axes, std::optional<GammaPair> gammas = {});

  std::size_t dim() const { return axes_.size(); }
  const CharacteristicPolygon& axis(std::size_t i) const { return axes_.at(i); }
  const std::vector<CharacteristicPolygon>& axes() const { return axes_; }
  /// Present when the axes were built from a (gamma1, gamma2) pair.
  const std::optional<GammaPair>& gammas() const { return gammas_; }

 private:
  std::vector<CharacteristicPolygon> axes_;
  std::optional<GammaPair> gammas_;
};

double covariance_at(const SeparableCovariance& c, std::span<const std::int64_t> k);

struct DeltaReport {
  double delta = 0.0;
  LatticePoint argmax;
  /// (1 - 2 gamma1)/(1 + 2 gamma1) and the comparison, when gammas are known.
  std::optional<double> threshold;
  std::optional<bool> below_threshold;
};

/// Maximum of r over [-R,R]^d without the origin.
DeltaReport delta_sup(const SeparableCovariance& c, int search_radius);

/// The example field's covariance eta1(i) eta2(j); gammas are checked with
/// validate_gammas.
SeparableCovariance example_covariance(GammaPair g = {}, std::size_t horizon = kDefaultPolygonHorizon);

/// JSON form: {"gamma1": x, "gamma2": y, "d": 2, "horizon": K,
///             "knots": [[[t,v],...], ...]}   (knots optional, per axis)
/// An explicit knot list replaces the corresponding axis with a flat-tailed
/// polygon. Axes past the second need explicit knots.
struct CovarianceSpec {
  GammaPair gammas{};
  std::size_t d = 2;
  std::size_t horizon = kDefaultPolygonHorizon;
  std::vector<std::optional<std::vector<Knot>>> knot_overrides;

  SeparableCovariance build() const;
};

void to_json(nlohmann::json& j, const CovarianceSpec& spec);
void from_json(const nlohmann::json& j, CovarianceSpec& spec);

}  // namespace phantom
