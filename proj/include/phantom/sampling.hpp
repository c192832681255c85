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
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "phantom/covariance.hpp"
#include "phantom/field.hpp"
#include "phantom/rng.hpp"

namespace phantom {

/// Law of i.i.d. innovations (or of an i.i.d. field's marginal).
struct InnovationLaw {
  enum class Kind { kUniform, kNormal, kDiscrete };
  Kind kind = Kind::kUniform;
  /// Discrete support, strictly increasing, with matching probabilities.
  std::vector<double> atoms;
  std::vector<double> probs;

  static InnovationLaw uniform() { return {}; }
  static InnovationLaw normal() { return {Kind::kNormal, {}, {}}; }
  static InnovationLaw discrete(std::vector<double> atoms, std::vector<double> probs);
  /// Atoms {0, 1} with P(1) = p.
  static InnovationLaw two_point(double p) { return discrete({0.0, 1.0}, {1.0 - p, p}); }

  double cdf(double x) const;
  double draw(Engine& rng) const;
  std::string name() const;
};

struct GaussianSeparableModel {
  SeparableCovariance covariance;
};

struct IidModel {
  InnovationLaw marginal;
};

/// X_k = max of innovations Z over the window box starting at k.
struct MovingMaxModel {
  Dims window;
  InnovationLaw innovation;
};

struct FieldModel {
  std::variant<GaussianSeparableModel, IidModel, MovingMaxModel> kind;

  double marginal_cdf(double x) const;
  std::string name() const;
};

/// Signals a per-axis Toeplitz matrix that failed Cholesky factorization.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(std::size_t axis, std::size_t minor, const std::string& what)
      : std::runtime_error(what), axis_(axis), minor_(minor) {}
  std::size_t axis() const { return axis_; }
  /// 1-based order of the first leading minor that is not positive.
  std::size_t minor() const { return minor_; }

 private:
  std::size_t axis_;
  std::size_t minor_;
};

/// Lower Cholesky factor of T[a,b] = eta(a - b), a,b < n.
Eigen::MatrixXd toeplitz_factor(const CharacteristicPolygon& eta, std::size_t n, std::size_t axis = 0);

/// Prepared sampler for one (model, dims) pair. Immutable after construction,
/// so one instance serves any number of threads.
class FieldSampler {
 public:
  FieldSampler(FieldModel model, Dims dims);

  const FieldModel& model() const { return model_; }
  const Dims& dims() const { return dims_; }

  /// One realization from Engine(seed).
  FieldSample draw(std::uint64_t seed) const;

 private:
  void apply_axis_factor(std::vector<double>& values, std::size_t axis) const;

  FieldModel model_;
  Dims dims_;
  std::vector<std::shared_ptr<const Eigen::MatrixXd>> factors_;
};

FieldSample sample_gaussian_separable(const SeparableCovariance& c, const Dims& dims, std::uint64_t seed);

FieldSample sample_moving_max(const Dims& window, const InnovationLaw& innovation, const Dims& dims,
                              std::uint64_t seed);

FieldSample sample_iid(const InnovationLaw& marginal, const Dims& dims, std::uint64_t seed);

/// sqrt(1 - rho) max(xi_1..xi_N) + sqrt(rho) zeta, all standard normal and
/// independent. The max is drawn by inverting Phi^N.
double sample_equicorrelated_max(std::uint64_t n, double rho, std::uint64_t seed);

/// P(M_[1,n] <= x) for a moving-max field: F_Z(x)^{prod (n_i + w_i - 1)}.
double moving_max_block_cdf(const MovingMaxModel& model, std::span<const std::size_t> n, double x);

/// P(M_[1,n] <= x) for an i.i.d. field: F(x)^{n*}.
double iid_block_cdf(const IidModel& model, std::span<const std::size_t> n, double x);

}  // namespace phantom
