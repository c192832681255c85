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

#include "phantom/phantom.hpp"

namespace phantom {

/// k consecutive parts per axis: parts[l][i] is the length of the l-th block
/// along axis i. Two parts are the (p, q) of the two-block functional.
struct BlockSplit {
  std::vector<Dims> parts;

  std::size_t k() const { return parts.size(); }
  /// Componentwise sum of the parts.
  Dims total() const;
  /// The k^d blocks, each anchored at the running offsets from the origin.
  std::vector<Rectangle> blocks() const;
};

/// floor(T psi_i(n)) per axis.
Dims split_bound(const LatticePoint& psi_n, double t);

/// Every split into k parts with total <= bound componentwise.
std::vector<BlockSplit> all_splits(const Dims& bound, std::size_t k);

/// Two-part grid: p_i, q_i in {0, N/4, N/2, 3N/4, N} (floors) with p_i + q_i <= N_i.
std::vector<BlockSplit> default_split_grid(const Dims& bound);

/// P(M_R <= v) for a rectangle R.
using BlockProbability = std::function<double(const Rectangle&)>;

enum class BetaMode { kExact, kMonteCarlo };

struct BetaReport {
  BetaMode mode = BetaMode::kExact;
  std::size_t k = 2;
  /// Max over the supplied grid; a lower bound on the functional.
  double value = 0.0;
  std::size_t grid_size = 0;
  std::optional<BlockSplit> argmax;
  /// Monte Carlo standard error at the argmax (0 in exact mode).
  double standard_error = 0.0;
};

/// max over splits of |P(M_total <= v) - prod_blocks P(M_block <= v)|;
/// empty blocks contribute factor 1.
BetaReport beta_from_probabilities(const std::vector<BlockSplit>& splits, const BlockProbability& prob);

/// Monte Carlo beta for two-part splits at level v. Every split must satisfy
/// total <= split_bound(psi_n, t); probabilities come from `reps` fields
/// sampled over the bounding rectangle.
BetaReport beta_estimate(const FieldModel& model, const LatticePoint& psi_n, double level, double t,
                         const std::vector<BlockSplit>& splits, std::size_t reps, std::uint64_t seed,
                         std::size_t workers = 0);

/// Same for k-part splits.
BetaReport beta_k_estimate(const FieldModel& model, const LatticePoint& psi_n, double level, double t, std::size_t k,
                           const std::vector<BlockSplit>& splits, std::size_t reps, std::uint64_t seed,
                           std::size_t workers = 0);

/// Closed-form block probabilities: F^{cells} for i.i.d. fields, the
/// covering-site law for moving maxima.
BlockProbability exact_block_probability(const FieldModel& model, double level);

/// Exhaustive law of a moving-max field with discrete innovations on the
/// rectangle [1, extent]: enumerates every innovation configuration on the
/// covering sites, builds the field and records, for each sub-rectangle,
/// the probability that its max is <= level.
class MovingMaxEnumeration {
 public:
  /// Throws std::invalid_argument for non-discrete innovations or more than
  /// `max_sites` covering sites.
  MovingMaxEnumeration(const MovingMaxModel& model, const Dims& extent, double level, std::size_t max_sites = 25);

  double probability(const Rectangle& r) const;
  std::size_t sites() const { return sites_; }
  BlockProbability as_function() const;

 private:
  std::size_t index_of(const Rectangle& r) const;

  Dims extent_;
  std::size_t sites_ = 0;
  std::vector<double> probs_;
};

struct BlockGrowthCheck {
  double beta2 = 0.0;
  double betak = 0.0;
  double bound = 0.0;
  bool holds = true;
};

/// beta(n,k) <= k^d beta(n) with both sups over all splits of `bound`.
BlockGrowthCheck check_block_growth(const BlockProbability& prob, const Dims& bound, std::size_t k, double tolerance = 1e-12);

/// Constant L(delta) of the normal comparison bound.
struct LRule {
  enum class Kind { kStandard, kConstant };
  Kind kind = Kind::kStandard;
  double value = 0.0;

  /// kStandard: (1/(2 pi)) (1 - delta^2)^{-1/2}.
  double evaluate(double delta) const;
  std::string describe() const;
};

struct BermanReport {
  double bound = 0.0;
  double sum = 0.0;
  /// Sum over A_n = [ceil(n^alpha), n]^d and over the rest (origin excluded).
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double l_value = 0.0;
  std::string l_rule;
};

/// 2^d L(delta) n^d sum_{k in [0,n]^d, k != 0} r(k) exp(-u^2 / (1 + r(k))),
/// evaluated point by point through covariance_at. alpha defaults to the
/// midpoint of (0, (1 - 3 delta)/(1 + delta)); NaN when that is empty.
BermanReport berman_bound(const SeparableCovariance& c, std::uint64_t n, double u, const LRule& rule = {},
                          std::optional<double> alpha = std::nullopt);

/// Same value through per-axis tables and row partial sums.
BermanReport berman_bound_factored(const SeparableCovariance& c, std::uint64_t n, double u, const LRule& rule = {},
                                   std::optional<double> alpha = std::nullopt);

struct BoundCheck {
  double empirical = 0.0;
  double reference = 0.0;
  double gap = 0.0;
  double bound = 0.0;
  double standard_error = 0.0;
  bool verdict = true;
};

/// |P_hat(M_[1,n]^d <= u) - Phi(u)^{n^d}| against the Berman bound, from an
/// already computed law of the max. Gaussian separable or i.i.d. normal only.
BoundCheck bound_vs_empirical(const EmpiricalLaw& law, const FieldModel& model, std::uint64_t n, double u,
                              const LRule& rule = {});

/// Samples [1, n]^d itself; d is taken from the covariance for Gaussian models.
BoundCheck bound_vs_empirical(const FieldModel& model, std::uint64_t n, double u, std::size_t reps, std::uint64_t seed,
                              const LRule& rule = {}, std::size_t d = 2, std::size_t workers = 0);

}  // namespace phantom
