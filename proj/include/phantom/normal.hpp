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

namespace phantom::normal {

/// Standard normal density.
double pdf(double x);

/// Standard normal distribution function Phi(x).
double cdf(double x);

/// Upper tail 1 - Phi(x), accurate far into the right tail.
double sf(double x);

/// ln Phi(x), accurate on both tails (log1p of the upper tail for x > 0).
double log_cdf(double x);

/// Phi^{-1}(p) for p in (0,1).
double quantile(double p);

/// Inverse of the upper tail: the x with 1 - Phi(x) = q, q in (0,1).
/// Keeps full relative precision for tiny q.
double upper_quantile(double q);

}  // namespace phantom::normal
