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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phantom/covariance.hpp"

namespace phantom {

/// psi(n)* as a floating product (exact for products below 2^53).
double point_product(const LatticePoint& p);

/// Map n -> N^d over the index domain [first, last]. Validity is checked by
/// validate_curve, not on construction.
class MonotoneCurve {
 public:
  using Fn = std::function<LatticePoint(std::uint64_t)>;

  MonotoneCurve(std::string name, std::size_t d, std::uint64_t first, Fn fn,
                std::optional<std::uint64_t> last = std::nullopt);

  /// Throws std::out_of_range outside [first, last].
  LatticePoint operator()(std::uint64_t n) const;

  const std::string& name() const { return name_; }
  std::size_t dim() const { return d_; }
  std::uint64_t first() const { return first_; }
  const std::optional<std::uint64_t>& last() const { return last_; }

  /// psi(first), ..., psi(horizon).
  std::vector<LatticePoint> table(std::uint64_t horizon) const;

 private:
  std::string name_;
  std::size_t d_;
  std::uint64_t first_;
  std::optional<std::uint64_t> last_;
  Fn fn_;
};

/// (floor(n/ln n), floor(ln n)) after a componentwise running-max repair.
/// Defined for n >= 3.
LatticePoint curve_psi_example(std::uint64_t n);

/// (n, ..., n).
LatticePoint curve_diagonal(std::uint64_t n, std::size_t d);

MonotoneCurve diagonal_curve(std::size_t d);
MonotoneCurve psi_example_curve();
/// Table curve indexed 1..table.size().
MonotoneCurve table_curve(std::vector<LatticePoint> table, std::string name = "table");

struct CurveViolation {
  enum class Kind { kNotMonotone, kNotStrict, kRatio, kBounded };
  Kind kind;
  std::uint64_t n;
  std::string message;
};

struct CurveReport {
  bool valid = true;
  std::vector<CurveViolation> violations;

  const CurveViolation* first_violation() const { return violations.empty() ? nullptr : &violations.front(); }
};

/// Finite-horizon check of: componentwise nondecreasing, strictly moving,
/// every coordinate growing over [first, horizon], and
/// psi(n)*/psi(n+1)* >= 1 - tol_ratio for n >= n_ratio (default horizon/2).
CurveReport validate_curve(const MonotoneCurve& psi, std::uint64_t horizon, double tol_ratio = 0.05,
                           std::optional<std::uint64_t> n_ratio = std::nullopt);

struct NeighborhoodOptions {
  std::uint64_t n0 = 1;
  /// Tolerate failures confined to the first half of [n0, horizon].
  bool allow_prefix = false;
  /// Largest psi index searched for a witness on unbounded curves.
  std::uint64_t search_limit = std::uint64_t{1} << 40;
};

struct NeighborhoodReport {
  bool inside = true;
  std::optional<std::uint64_t> first_failure;
  std::optional<std::uint64_t> last_failure;
};

/// Whether phi(n) lies in U(psi, C): for each n in [n0, horizon] some j has
/// psi_i(j)/C <= phi_i(n) <= C psi_i(j) for every i.
NeighborhoodReport in_neighborhood(const MonotoneCurve& phi, const MonotoneCurve& psi, double c,
                                   std::uint64_t horizon, const NeighborhoodOptions& options = {});

/// Unit-step path through every m(k); coordinates are raised in index order
/// 0..d-1 between waypoints. Throws std::invalid_argument unless m is
/// nondecreasing with distinct consecutive points.
MonotoneCurve densify_to_curve(const std::vector<LatticePoint>& m);

/// {"kind": "diagonal"|"psi_example"|"table", "table": [[..],...]}
MonotoneCurve curve_from_json(const nlohmann::json& j, std::size_t d);

}  // namespace phantom
