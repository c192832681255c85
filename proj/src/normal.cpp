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

#include "phantom/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace phantom::normal {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

double pdf(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_cdf(double x) {
  if (x > 0.0) return std::log1p(-sf(x));
  const double p = cdf(x);
  if (p >= std::numeric_limits<double>::min()) return std::log(p);
  if (x > -140.0) {
    const long double q = 0.5L * std::erfc(-static_cast<long double>(x) / std::numbers::sqrt2_v<long double>);
    return static_cast<double>(std::log(q));
  }
  // Mills-ratio series past the long double range.
  const double z = 1.0 / (x * x);
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log1p(z * (-1.0 + z * (3.0 + z * (-15.0 + 105.0 * z))));
}

double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal::quantile: p must lie in (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double upper_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("normal::upper_quantile: q must lie in (0,1)");
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

}  // namespace phantom::normal
