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

#include "phantom/covariance.hpp"

#include <cstdlib>
#include <stdexcept>

#include <fmt/format.h>

namespace phantom {

SeparableCovariance::SeparableCovariance(std::vector<CharacteristicPolygon> axes, std::optional<GammaPair> gammas)
    : axes_(std::move(axes)), gammas_(gammas) {
  if (axes_.empty()) throw std::invalid_argument("SeparableCovariance: need at least one axis");
}

double covariance_at(const SeparableCovariance& c, std::span<const std::int64_t> k) {
  if (k.size() != c.dim()) {
    throw std::invalid_argument(fmt::format("covariance_at: point has {} coordinates, covariance is {}-d", k.size(), c.dim()));
  }
  double r = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) r *= c.axis(i)(static_cast<double>(std::llabs(k[i])));
  return r;
}

DeltaReport delta_sup(const SeparableCovariance& c, int search_radius) {
  if (search_radius < 1) throw std::invalid_argument("delta_sup: search_radius must be >= 1");
  const std::size_t d = c.dim();
  const std::int64_t radius = search_radius;
  // Axis tables over 0..R; r is even in every coordinate.
  std::vector<std::vector<double>> table(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::int64_t t = 0; t <= radius; ++t) table[i].push_back(c.axis(i)(static_cast<double>(t)));
  }
  DeltaReport report;
  report.delta = -1.0;
  LatticePoint k(d, -radius);
  while (true) {
    bool origin = true;
    double r = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      origin = origin && k[i] == 0;
      r *= table[i][static_cast<std::size_t>(std::llabs(k[i]))];
    }
    if (!origin && r > report.delta) {
      report.delta = r;
      report.argmax = k;
    }
    std::size_t axis = 0;
    while (axis < d && k[axis] == radius) k[axis++] = -radius;
    if (axis == d) break;
    ++k[axis];
  }
  if (c.gammas()) {
    report.threshold = delta_threshold(c.gammas()->gamma1);
    report.below_threshold = report.delta < *report.threshold;
  }
  return report;
}

SeparableCovariance example_covariance(GammaPair g, std::size_t horizon) {
  if (!validate_gammas(g)) {
    throw std::invalid_argument(fmt::format("example_covariance: (gamma1, gamma2) = ({}, {}) violates the admissibility chain",
                                            g.gamma1, g.gamma2));
  }
  std::vector<CharacteristicPolygon> axes{build_eta1(g.gamma1, horizon), build_eta2(g.gamma2, horizon)};
  return SeparableCovariance(std::move(axes), g);
}

SeparableCovariance CovarianceSpec::build() const {
  if (d == 0) throw std::invalid_argument("covariance spec: d must be positive");
  bool uses_gammas = false;
  std::vector<CharacteristicPolygon> axes;
  for (std::size_t i = 0; i < d; ++i) {
    if (i < knot_overrides.size() && knot_overrides[i]) {
      CharacteristicPolygon polygon(*knot_overrides[i]);
      if (auto report = validate_polya(polygon); !report) {
        throw std::invalid_argument(fmt::format("covariance spec: axis {} knots: {}", i, report.diagnostics.front()));
      }
      axes.push_back(std::move(polygon));
    } else if (i == 0) {
      axes.push_back(build_eta1(gammas.gamma1, horizon));
      uses_gammas = true;
    } else if (i == 1) {
      axes.push_back(build_eta2(gammas.gamma2, horizon));
      uses_gammas = true;
    } else {
      throw std::invalid_argument(fmt::format("covariance spec: axis {} has no knot list", i));
    }
  }
  if (uses_gammas && d == 2 && !validate_gammas(gammas)) {
    throw std::invalid_argument(fmt::format("covariance spec: (gamma1, gamma2) = ({}, {}) violates the admissibility chain",
                                            gammas.gamma1, gammas.gamma2));
  }
  std::optional<GammaPair> recorded;
  if (uses_gammas) recorded = gammas;
  return SeparableCovariance(std::move(axes), recorded);
}

void to_json(nlohmann::json& j, const CovarianceSpec& spec) {
  j = nlohmann::json{{"gamma1", spec.gammas.gamma1}, {"gamma2", spec.gammas.gamma2}, {"d", spec.d},
                     {"horizon", spec.horizon}};
  if (!spec.knot_overrides.empty()) {
    auto knots = nlohmann::json::array();
    for (const auto& axis : spec.knot_overrides) {
      if (!axis) {
        knots.push_back(nullptr);
        continue;
      }
      auto list = nlohmann::json::array();
      for (const auto& k : *axis) list.push_back({k.t, k.v});
      knots.push_back(std::move(list));
    }
    j["knots"] = std::move(knots);
  }
}

void from_json(const nlohmann::json& j, CovarianceSpec& spec) {
  spec = CovarianceSpec{};
  spec.gammas.gamma1 = j.value("gamma1", spec.gammas.gamma1);
  spec.gammas.gamma2 = j.value("gamma2", spec.gammas.gamma2);
  spec.d = j.value("d", spec.d);
  spec.horizon = j.value("horizon", spec.horizon);
  if (j.contains("knots")) {
    for (const auto& axis : j.at("knots")) {
      if (axis.is_null()) {
        spec.knot_overrides.emplace_back();
        continue;
      }
      std::vector<Knot> knots;
      for (const auto& pair : axis) knots.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
      spec.knot_overrides.emplace_back(std::move(knots));
    }
  }
}

}  // namespace phantom
