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

#include "phantom/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <lapacke.h>

#include "phantom/normal.hpp"

namespace phantom {

namespace {

// Pivots below this fraction of the diagonal count as singular.
constexpr double kPivotFloor = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double power_cdf(double f, double m) {
  if (f <= 0.0) return 0.0;
  if (f >= 1.0) return 1.0;
  return std::exp(m * std::log(f));
}

}  // namespace

InnovationLaw InnovationLaw::discrete(std::vector<double> atoms, std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size()) throw std::invalid_argument("InnovationLaw: atoms/probs mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0 && !(atoms[i] > atoms[i - 1])) throw std::invalid_argument("InnovationLaw: atoms must increase");
    if (!(probs[i] >= 0.0)) throw std::invalid_argument("InnovationLaw: negative probability");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("InnovationLaw: probabilities must sum to 1");
  return {Kind::kDiscrete, std::move(atoms), std::move(probs)};
}

double InnovationLaw::cdf(double x) const {
  switch (kind) {
    case Kind::kUniform:
      return std::clamp(x, 0.0, 1.0);
    case Kind::kNormal:
      return normal::cdf(x);
    case Kind::kDiscrete: {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms.size() && atoms[i] <= x; ++i) acc += probs[i];
      return std::min(acc, 1.0);
    }
  }
  return 0.0;
}

double InnovationLaw::draw(Engine& rng) const {
  switch (kind) {
    case Kind::kUniform:
      return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    case Kind::kNormal:
      return std::normal_distribution<double>(0.0, 1.0)(rng);
    case Kind::kDiscrete: {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
        acc += probs[i];
        if (u < acc) return atoms[i];
      }
      return atoms.back();
    }
  }
  return 0.0;
}

std::string InnovationLaw::name() const {
  switch (kind) {
    case Kind::kUniform:
      return "uniform";
    case Kind::kNormal:
      return "normal";
    case Kind::kDiscrete:
      return fmt::format("discrete({} atoms)", atoms.size());
  }
  return "?";
}

double FieldModel::marginal_cdf(double x) const {
  return std::visit(Overloaded{
                        [x](const GaussianSeparableModel&) { return normal::cdf(x); },
                        [x](const IidModel& m) { return m.marginal.cdf(x); },
                        [x](const MovingMaxModel& m) {
                          return power_cdf(m.innovation.cdf(x), static_cast<double>(cell_count(m.window)));
                        },
                    },
                    kind);
}

std::string FieldModel::name() const {
  return std::visit(Overloaded{
                        [](const GaussianSeparableModel&) { return std::string("gaussian_separable"); },
                        [](const IidModel& m) { return "iid_" + m.marginal.name(); },
                        [](const MovingMaxModel& m) { return "moving_max_" + m.innovation.name(); },
                    },
                    kind);
}

Eigen::MatrixXd toeplitz_factor(const CharacteristicPolygon& eta, std::size_t n, std::size_t axis) {
  if (n == 0) throw std::invalid_argument("toeplitz_factor: empty axis");
  std::vector<double> lag(n);
  for (std::size_t k = 0; k < n; ++k) lag[k] = eta(static_cast<double>(k));
  Eigen::MatrixXd t(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) t(a, b) = lag[a > b ? a - b : b - a];
  }
  const lapack_int order = static_cast<lapack_int>(n);
  const lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', order, t.data(), order);
  if (info > 0) {
    throw FactorizationError(axis, static_cast<std::size_t>(info),
                             fmt::format("Toeplitz factorization failed on axis {}: leading minor {} not positive", axis,
                                         info));
  }
  if (info < 0) throw std::runtime_error("toeplitz_factor: bad LAPACK argument");
  for (std::size_t k = 0; k < n; ++k) {
    if (t(k, k) * t(k, k) < kPivotFloor * lag[0]) {
      throw FactorizationError(axis, k + 1,
                               fmt::format("Toeplitz factorization failed on axis {}: leading minor {} numerically singular",
                                           axis, k + 1));
    }
  }
  Eigen::MatrixXd lower = t.triangularView<Eigen::Lower>();
  return lower;
}

FieldSampler::FieldSampler(FieldModel model, Dims dims) : model_(std::move(model)), dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("FieldSampler: dims must be nonempty");
  for (auto n : dims_) {
    if (n == 0) throw std::invalid_argument("FieldSampler: dims must be >= 1 componentwise");
  }
  if (const auto* g = std::get_if<GaussianSeparableModel>(&model_.kind)) {
    if (g->covariance.dim() != dims_.size()) {
      throw std::invalid_argument(fmt::format("FieldSampler: {}-d covariance with {}-d dims", g->covariance.dim(), dims_.size()));
    }
    // Reuse factors for axes sharing (polygon storage, length).
    std::map<std::pair<const Knot*, std::size_t>, std::shared_ptr<const Eigen::MatrixXd>> cache;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const auto& eta = g->covariance.axis(i);
      const auto key = std::make_pair(eta.knots().data(), dims_[i]);
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache.emplace(key, std::make_shared<const Eigen::MatrixXd>(toeplitz_factor(eta, dims_[i], i))).first;
      }
      factors_.push_back(it->second);
    }
  } else if (const auto* m = std::get_if<MovingMaxModel>(&model_.kind)) {
    if (m->window.size() != dims_.size()) throw std::invalid_argument("FieldSampler: window dimension mismatch");
    for (auto w : m->window) {
      if (w == 0) throw std::invalid_argument("FieldSampler: window must be >= 1 componentwise");
    }
  }
}

void FieldSampler::apply_axis_factor(std::vector<double>& values, std::size_t axis) const {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto& factor = *factors_[axis];
  const auto n = static_cast<Eigen::Index>(dims_[axis]);
  std::size_t outer = 1;
  std::size_t inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= dims_[i];
  for (std::size_t i = axis + 1; i < dims_.size(); ++i) inner *= dims_[i];
  if (inner == 1) {
    // Rows are the fibers: X <- X L^T.
    Eigen::Map<RowMajor> block(values.data(), static_cast<Eigen::Index>(outer), n);
    RowMajor result = block * factor.transpose().triangularView<Eigen::Upper>();
    block = result;
    return;
  }
  const auto cols = static_cast<Eigen::Index>(inner);
  for (std::size_t o = 0; o < outer; ++o) {
    Eigen::Map<RowMajor> block(values.data() + o * dims_[axis] * inner, n, cols);
    RowMajor result = factor.triangularView<Eigen::Lower>() * block;
    block = result;
  }
}

FieldSample FieldSampler::draw(std::uint64_t seed) const {
  Engine rng(seed);
  FieldSample sample(dims_, seed);
  std::visit(Overloaded{
                 [&](const GaussianSeparableModel&) {
                   std::normal_distribution<double> gauss(0.0, 1.0);
                   for (auto& v : sample.values) v = gauss(rng);
                   for (std::size_t axis = 0; axis < dims_.size(); ++axis) apply_axis_factor(sample.values, axis);
                 },
                 [&](const IidModel& m) {
                   for (auto& v : sample.values) v = m.marginal.draw(rng);
                 },
                 [&](const MovingMaxModel& m) {
                   Dims extent(dims_.size());
                   for (std::size_t i = 0; i < dims_.size(); ++i) extent[i] = dims_[i] + m.window[i] - 1;
                   std::vector<double> z(cell_count(extent));
                   for (auto& v : z) v = m.innovation.draw(rng);
                   // Sliding max is separable: shrink one axis at a time.
                   for (std::size_t axis = 0; axis < dims_.size(); ++axis) {
                     std::size_t outer = 1;
                     std::size_t inner = 1;
                     for (std::size_t i = 0; i < axis; ++i) outer *= extent[i];
                     for (std::size_t i = axis + 1; i < extent.size(); ++i) inner *= extent[i];
                     const std::size_t len = extent[axis];
                     const std::size_t out_len = dims_[axis];
                     const std::size_t w = m.window[axis];
                     std::vector<double> next(outer * out_len * inner);
                     for (std::size_t o = 0; o < outer; ++o) {
                       for (std::size_t k = 0; k < out_len; ++k) {
                         for (std::size_t in = 0; in < inner; ++in) {
                           double best = z[(o * len + k) * inner + in];
                           for (std::size_t s = 1; s < w; ++s) best = std::max(best, z[(o * len + k + s) * inner + in]);
                           next[(o * out_len + k) * inner + in] = best;
                         }
                       }
                     }
                     extent[axis] = out_len;
                     z = std::move(next);
                   }
                   sample.values = std::move(z);
                 },
             },
             model_.kind);
  return sample;
}

FieldSample sample_gaussian_separable(const SeparableCovariance& c, const Dims& dims, std::uint64_t seed) {
  return FieldSampler(FieldModel{GaussianSeparableModel{c}}, dims).draw(seed);
}

FieldSample sample_moving_max(const Dims& window, const InnovationLaw& innovation, const Dims& dims,
                              std::uint64_t seed) {
  return FieldSampler(FieldModel{MovingMaxModel{window, innovation}}, dims).draw(seed);
}

FieldSample sample_iid(const InnovationLaw& marginal, const Dims& dims, std::uint64_t seed) {
  return FieldSampler(FieldModel{IidModel{marginal}}, dims).draw(seed);
}

double sample_equicorrelated_max(std::uint64_t n, double rho, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_equicorrelated_max: N must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("sample_equicorrelated_max: rho must lie in [0,1)");
  Engine rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = 0.0;
  while (u <= 0.0) u = unif(rng);
  // P(max <= m) = Phi(m)^N = u  <=>  1 - Phi(m) = -expm1(ln u / N).
  const double tail = -std::expm1(std::log(u) / static_cast<double>(n));
  const double iid_max = tail >= 1.0 ? -std::numeric_limits<double>::infinity() : normal::upper_quantile(tail);
  const double zeta = std::normal_distribution<double>(0.0, 1.0)(rng);
  return std::sqrt(1.0 - rho) * iid_max + std::sqrt(rho) * zeta;
}

double moving_max_block_cdf(const MovingMaxModel& model, std::span<const std::size_t> n, double x) {
  if (n.size() != model.window.size()) throw std::invalid_argument("moving_max_block_cdf: dimension mismatch");
  double sites = 1.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == 0) return 1.0;
    sites *= static_cast<double>(n[i] + model.window[i] - 1);
  }
  return power_cdf(model.innovation.cdf(x), sites);
}

double iid_block_cdf(const IidModel& model, std::span<const std::size_t> n, double x) {
  return power_cdf(model.marginal.cdf(x), static_cast<double>(cell_count(n)));
}

}  // namespace phantom
