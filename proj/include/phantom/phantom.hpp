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
#include <span>
#include <string>
#include <vector>

#include "phantom/lattice.hpp"
#include "phantom/sampling.hpp"

namespace phantom {

/// A distribution function G together with its power G(x)^m.
class PhantomCandidate {
 public:
  using Cdf = std::function<double(double)>;
  using Power = std::function<double(double, double)>;

  /// `jumps` lists discontinuities of G (empty for continuous G). Without an
  /// explicit power, G^m = exp(m ln G) with exact 0 and 1 branches.
  PhantomCandidate(std::string name, Cdf cdf, std::vector<double> jumps = {}, Power power = {});

  double operator()(double x) const { return cdf_(x); }
  double power(double x, double m) const;
  std::span<const double> jumps() const { return jumps_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Cdf cdf_;
  std::vector<double> jumps_;
  Power power_;
};

/// Phi, with the power taken through ln Phi so m ~ 1e8 keeps its precision.
PhantomCandidate normal_candidate();

/// Sorted sample of a max statistic.
class EmpiricalLaw {
 public:
  EmpiricalLaw(std::vector<double> samples, std::string provenance, Dims dims = {});

  /// #{M_r <= x} / R.
  double cdf(double x) const;
  std::size_t replications() const { return sorted_.size(); }
  std::span<const double> sorted() const { return sorted_; }
  const std::string& provenance() const { return provenance_; }
  /// Rectangle size the maxima were taken over (empty if unknown).
  const Dims& dims() const { return dims_; }
  /// Order statistic of rank ceil(gamma R).
  double quantile(double gamma) const;

 private:
  std::vector<double> sorted_;
  std::string provenance_;
  Dims dims_;
};

/// The step function itself as a candidate (jumps at the sample points).
PhantomCandidate empirical_candidate(const EmpiricalLaw& law);

/// `reps` independent draws of M over [1, dims]; replication r uses
/// substream r of `seed`.
EmpiricalLaw empirical_max_law(const FieldModel& model, const Dims& dims, std::size_t reps, std::uint64_t seed,
                               std::size_t workers = 0);
/// Same, reusing a prepared sampler.
EmpiricalLaw empirical_max_law(const FieldSampler& sampler, std::size_t reps, std::uint64_t seed,
                               std::size_t workers = 0);

struct DistanceReport {
  double distance = 0.0;
  /// Where the sup is attained (left limit when `left` is set).
  double location = 0.0;
  bool left = false;
  /// G^m at the sup location.
  double candidate_value = 0.0;
  /// sqrt(G^m (1 - G^m) / R) at the sup location.
  double standard_error = 0.0;
};

/// sup_x |F_hat(x) - G(x)^m|, evaluated exactly at every jump of F_hat and of
/// G from both sides.
DistanceReport phantom_distance_report(const EmpiricalLaw& law, const PhantomCandidate& g, double m);
double phantom_distance(const EmpiricalLaw& law, const PhantomCandidate& g, double m);

/// sup_x |P(x) - G(x)^m| for a closed-form law P, over an even grid of
/// `points` on [lo, hi] plus both sides of every jump of G.
double phantom_distance_exact(const std::function<double(double)>& law, const PhantomCandidate& g, double m, double lo,
                              double hi, std::size_t points = 100001);

/// Curve-indexed levels with gamma target; `levels` are nondecreasing.
struct LevelSequence {
  std::string curve;
  double gamma = 0.5;
  std::vector<std::uint64_t> index;
  std::vector<LatticePoint> points;
  /// psi(n)*.
  std::vector<double> sizes;
  std::vector<double> raw_levels;
  std::vector<double> levels;
  /// n where the raw level fell below an earlier one and was raised.
  std::vector<std::uint64_t> repaired_at;
};

/// Builds a LevelSequence from raw levels, applying the running-max repair.
LevelSequence make_level_sequence(const MonotoneCurve& psi, double gamma, std::uint64_t horizon,
                                  const std::function<double(const LatticePoint&, std::uint64_t)>& raw_level);

/// Empirical gamma-quantiles of M_psi(n) for n in [first, horizon].
LevelSequence estimate_level_sequence(const FieldModel& model, const MonotoneCurve& psi, double gamma,
                                      std::uint64_t horizon, std::size_t reps, std::uint64_t seed,
                                      std::size_t workers = 0);

/// Step function G(x) = 0 below v(1), gamma^{1/psi(n)*} on [v(n), v(n+1)),
/// gamma^{1/psi(H)*} at the last stored level v(H) and 1 above it. With `smooth`, G is instead
/// interpolated linearly between consecutive steps (not the step law).
PhantomCandidate construct_G_psi(const LevelSequence& levels, bool smooth = false);

/// Solves cdf(x) = target by bisection on [lo, hi] (cdf nondecreasing).
double solve_level(const std::function<double(double)>& cdf, double target, double lo, double hi);

/// u with n^2 (1 - Phi(u)) = c.
double levels_u(double c, std::uint64_t n);

struct Normalizers {
  double a;
  double b;
};

/// a_n = sqrt(2 ln n), b_n = a_n - (ln ln n + ln 4 pi) / (2 a_n); n >= 3.
Normalizers normalizers(double n);

/// H(x) = E exp(-exp(-x - kappa + sqrt(2 kappa) Z)), Gauss-Hermite.
double limit_H(double x, double kappa);
/// Same integral by adaptive Gauss-Kronrod.
double limit_H_adaptive(double x, double kappa);

/// exp(-exp(-x)).
double gumbel_H0(double x);

/// P(sqrt(1-rho) max(xi_1..xi_N) + sqrt(rho) zeta <= w)
///   = E Phi((w - sqrt(rho) Z)/sqrt(1 - rho))^N, Gauss-Hermite.
double equicorrelated_max_cdf(double n, double rho, double w);
/// Same integral by adaptive Gauss-Kronrod.
double equicorrelated_max_cdf_adaptive(double n, double rho, double w);

/// theta = ln gamma_or / ln gamma_in. Throws std::domain_error when an input
/// leaves (0,1) or theta falls outside (0,1].
double extremal_index(double gamma_or, double gamma_in);

struct ExtremalIndexWitness {
  double level = 0.0;
  double gamma_in = 0.0;
  double gamma_or = 0.0;
  double theta = 0.0;
};

/// Exact witness on a moving-max field: v solves F(v)^{n*} = gamma_in for
/// the marginal F, gamma_or = P(M_n <= v) from the closed-form block law.
ExtremalIndexWitness moving_max_extremal_index(const MovingMaxModel& model, const Dims& n, double gamma_in);

}  // namespace phantom
