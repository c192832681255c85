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

#include <cmath>

#include "phantom/covariance.hpp"

namespace phantom::testing {

// Default example covariance, built once per binary.
inline const SeparableCovariance& example() {
  static const SeparableCovariance c = example_covariance();
  return c;
}

inline double f_loglog(double k) { return std::log(std::log(k)) / std::log(k); }

}  // namespace phantom::testing
