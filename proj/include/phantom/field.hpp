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
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "phantom/covariance.hpp"

namespace phantom {

using Dims = std::vector<std::size_t>;

inline constexpr double kEmptyMax = -std::numeric_limits<double>::infinity();

/// Product of the coordinates (the cell count n*).
std::size_t cell_count(std::span<const std::size_t> dims);

/// A realization over [1..n_1] x ... x [1..n_d], stored row-major (last axis
/// fastest).
struct FieldSample {
  Dims dims;
  std::vector<double> values;
  std::uint64_t seed = 0;

  FieldSample() = default;
  FieldSample(Dims d, std::uint64_t s);

  /// Entry at 1-based lattice index.
  double at(std::span<const std::int64_t> index) const;
  double max() const;
};

/// Inclusive 1-based box [lo, hi]. Empty when lo_i > hi_i for some i.
struct Rectangle {
  LatticePoint lo;
  LatticePoint hi;

  bool empty() const;
  std::size_t cells() const;

  /// [1, n] for a size vector n; zero components give an empty rectangle.
  static Rectangle from_origin(std::span<const std::size_t> n);
};

/// Max over the rectangle; kEmptyMax when it is empty. Throws
/// std::out_of_range when a nonempty rectangle leaves the sample.
double block_max(const FieldSample& sample, const Rectangle& r);

/// "# dims=AxB seed=S" header, then one line per last-axis fiber.
void write_csv(std::ostream& out, const FieldSample& sample);

}  // namespace phantom
