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
#include <functional>
#include <vector>

namespace phantom::quadrature {

/// Nodes and weights of an n-point Gauss-Hermite rule rescaled to the
/// standard normal weight, so that sum_i w_i f(z_i) ~ E f(Z), Z ~ N(0,1).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(const std::function<double(double)>& f) const;
};

/// Builds the rule by Newton iteration on the orthonormal Hermite recurrence.
GaussHermiteRule gauss_hermite(std::size_t n);

/// Shared 200-node rule, built once.
const GaussHermiteRule& default_rule();

/// E f(Z) for Z ~ N(0,1) by adaptive 61-point Gauss-Kronrod on [-lim, lim].
/// Independent of the Hermite rule; used as its cross-check. rel_tol is relative to the L1 norm of f*phi.
double normal_expectation_adaptive(const std::function<double(double)>& f, double rel_tol = 1e-12,
                                   double lim = 38.5);

}  // namespace phantom::quadrature
