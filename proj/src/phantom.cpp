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

#include "phantom/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "phantom/normal.hpp"
#include "phantom/parallel.hpp"
#include "phantom/quadrature.hpp"

namespace phantom {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double before(double x) { return std::nextafter(x, kNegInf); }

double log_space_power(double g, double m) {
  if (g <= 0.0) return 0.0;
  if (g >= 1.0) return 1.0;
  return std::exp(m * std::log(g));
}

}  // namespace

PhantomCandidate::PhantomCandidate(std::string name, Cdf cdf, std::vector<double> jumps, Power power)
    : name_(std::move(name)), cdf_(std::move(cdf)), jumps_(std::move(jumps)), power_(std::move(power)) {
  std::sort(jumps_.begin(), jumps_.end());
  jumps_.erase(std::unique(jumps_.begin(), jumps_.end()), jumps_.end());
}

double PhantomCandidate::power(double x, double m) const {
  if (power_) return power_(x, m);
  return log_space_power(cdf_(x), m);
}

PhantomCandidate normal_candidate() {
  return PhantomCandidate("Phi", normal::cdf, {}, [](double x, double m) {
    const double lp = normal::log_cdf(x);
    if (lp == 0.0) return 1.0;
    return std::exp(m * lp);
  });
}

EmpiricalLaw::EmpiricalLaw(std::vector<double> samples, std::string provenance, Dims dims)
    : sorted_(std::move(samples)), provenance_(std::move(provenance)), dims_(std::move(dims)) {
  if (sorted_.empty()) throw std::invalid_argument("EmpiricalLaw: no replications");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalLaw::cdf(double x) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

double EmpiricalLaw::quantile(double gamma) const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("EmpiricalLaw::quantile: gamma must lie in (0,1)");
  const auto r = static_cast<double>(sorted_.size());
  auto rank = static_cast<std::size_t>(std::ceil(gamma * r));
  rank = std::clamp<std::size_t>(rank, 1, sorted_.size());
  return sorted_[rank - 1];
}

PhantomCandidate empirical_candidate(const EmpiricalLaw& law) {
  std::vector<double> jumps(law.sorted().begin(), law.sorted().end());
  return PhantomCandidate(
      "empirical", [law](double x) { return law.cdf(x); }, std::move(jumps));
}

EmpiricalLaw empirical_max_law(const FieldSampler& sampler, std::size_t reps, std::uint64_t seed,
                               std::size_t workers) {
  if (reps == 0) throw std::invalid_argument("empirical_max_law: reps must be >= 1");
  std::vector<double> maxima(reps);
  parallel_for(reps, workers, [&](std::size_t r) { maxima[r] = sampler.draw(substream_seed(seed, r)).max(); });
  std::string dims;
  for (std::size_t i = 0; i < sampler.dims().size(); ++i) dims += (i ? "x" : "") + std::to_string(sampler.dims()[i]);
  return EmpiricalLaw(std::move(maxima), fmt::format("{} dims={} reps={} seed={}", sampler.model().name(), dims, reps, seed),
                      sampler.dims());
}

EmpiricalLaw empirical_max_law(const FieldModel& model, const Dims& dims, std::size_t reps, std::uint64_t seed,
                               std::size_t workers) {
  return empirical_max_law(FieldSampler(model, dims), reps, seed, workers);
}

DistanceReport phantom_distance_report(const EmpiricalLaw& law, const PhantomCandidate& g, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("phantom_distance: m must be positive");
  const auto r = static_cast<double>(law.replications());
  DistanceReport best;
  best.distance = -1.0;
  auto probe = [&](double x, bool left) {
    const double at = left ? before(x) : x;
    const double f = law.cdf(at);
    const double gm = g.power(at, m);
    const double dist = std::abs(f - gm);
    if (dist > best.distance) {
      best.distance = dist;
      best.location = x;
      best.left = left;
      best.candidate_value = gm;
    }
  };
  const auto sample = law.sorted();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (i > 0 && sample[i] == sample[i - 1]) continue;
    probe(sample[i], true);
    probe(sample[i], false);
  }
  for (double x : g.jumps()) {
    probe(x, true);
    probe(x, false);
  }
  best.standard_error = std::sqrt(best.candidate_value * (1.0 - best.candidate_value) / r);
  return best;
}

double phantom_distance(const EmpiricalLaw& law, const PhantomCandidate& g, double m) {
  return phantom_distance_report(law, g, m).distance;
}

double phantom_distance_exact(const std::function<double(double)>& law, const PhantomCandidate& g, double m, double lo,
                              double hi, std::size_t points) {
  if (!(m > 0.0)) throw std::invalid_argument("phantom_distance_exact: m must be positive");
  if (!(hi > lo) || points < 2) throw std::invalid_argument("phantom_distance_exact: need lo < hi and >= 2 points");
  double sup = 0.0;
  auto probe = [&](double x) { sup = std::max(sup, std::abs(law(x) - g.power(x, m))); };
  for (std::size_t i = 0; i < points; ++i) {
    probe(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  for (double x : g.jumps()) {
    probe(before(x));
    probe(x);
  }
  return sup;
}

LevelSequence make_level_sequence(const MonotoneCurve& psi, double gamma, std::uint64_t horizon,
                                  const std::function<double(const LatticePoint&, std::uint64_t)>& raw_level) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("level sequence: gamma must lie in (0,1)");
  if (horizon < psi.first()) throw std::invalid_argument("level sequence: horizon below the curve's first index");
  LevelSequence seq;
  seq.curve = psi.name();
  seq.gamma = gamma;
  double running = kNegInf;
  for (std::uint64_t n = psi.first(); n <= horizon; ++n) {
    LatticePoint p = psi(n);
    const double raw = raw_level(p, n);
    if (raw < running) seq.repaired_at.push_back(n);
    running = std::max(running, raw);
    seq.index.push_back(n);
    seq.sizes.push_back(point_product(p));
    seq.points.push_back(std::move(p));
    seq.raw_levels.push_back(raw);
    seq.levels.push_back(running);
  }
  return seq;
}

LevelSequence estimate_level_sequence(const FieldModel& model, const MonotoneCurve& psi, double gamma,
                                      std::uint64_t horizon, std::size_t reps, std::uint64_t seed,
                                      std::size_t workers) {
  return make_level_sequence(psi, gamma, horizon, [&](const LatticePoint& p, std::uint64_t n) {
    Dims dims;
    for (auto v : p) {
      if (v < 1) throw std::invalid_argument(fmt::format("estimate_level_sequence: psi({}) has a zero coordinate", n));
      dims.push_back(static_cast<std::size_t>(v));
    }
    return empirical_max_law(model, dims, reps, substream_seed(seed, n), workers).quantile(gamma);
  });
}

PhantomCandidate construct_G_psi(const LevelSequence& seq, bool smooth) {
  if (seq.levels.empty()) throw std::invalid_argument("construct_G_psi: empty level sequence");
  if (!(seq.gamma > 0.0 && seq.gamma < 1.0)) throw std::invalid_argument("construct_G_psi: gamma must lie in (0,1)");
  for (std::size_t i = 1; i < seq.levels.size(); ++i) {
    if (seq.levels[i] < seq.levels[i - 1]) {
      throw std::invalid_argument(fmt::format("construct_G_psi: levels decrease at n = {}", seq.index[i]));
    }
  }
  const auto levels = std::make_shared<const std::vector<double>>(seq.levels);
  const auto sizes = std::make_shared<const std::vector<double>>(seq.sizes);
  const double gamma = seq.gamma;
  // Index of the step containing x; -1 below v(1) and above the last stored level.
  auto step = [levels](double x) -> std::ptrdiff_t {
    if (x < levels->front() || x > levels->back()) return -1;
    return (std::upper_bound(levels->begin(), levels->end(), x) - levels->begin()) - 1;
  };
  if (smooth) {
    auto cdf = [levels, sizes, gamma, step](double x) {
      if (x < levels->front()) return 0.0;
      const auto i = step(x);
      if (i < 0) return 1.0;
      const auto k = static_cast<std::size_t>(i);
      const double g0 = std::pow(gamma, 1.0 / (*sizes)[k]);
      if (k + 1 == levels->size()) return g0;
      const double g1 = std::pow(gamma, 1.0 / (*sizes)[k + 1]);
      const double w = (x - (*levels)[k]) / ((*levels)[k + 1] - (*levels)[k]);
      return g0 + w * (g1 - g0);
    };
    return PhantomCandidate("G_psi_smoothed(non-step)", cdf, {levels->front(), levels->back()});
  }
  auto cdf = [levels, sizes, gamma, step](double x) {
    if (x < levels->front()) return 0.0;
    const auto i = step(x);
    if (i < 0) return 1.0;
    return std::pow(gamma, 1.0 / (*sizes)[static_cast<std::size_t>(i)]);
  };
  auto power = [levels, sizes, gamma, step](double x, double m) {
    if (x < levels->front()) return 0.0;
    const auto i = step(x);
    if (i < 0) return 1.0;
    // m / psi(n)* is exactly 1 at m = psi(n)*, so G(v(n))^{psi(n)*} = gamma.
    return std::pow(gamma, m / (*sizes)[static_cast<std::size_t>(i)]);
  };
  return PhantomCandidate("G_psi", cdf, seq.levels, power);
}

double solve_level(const std::function<double(double)>& cdf, double target, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("solve_level: empty bracket");
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cdf(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double levels_u(double c, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("levels_u: n must be positive");
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  if (!(c > 0.0) || !(c < n2)) throw std::invalid_argument(fmt::format("levels_u: need 0 < c < n^2, got c = {}, n = {}", c, n));
  return normal::upper_quantile(c / n2);
}

Normalizers normalizers(double n) {
  if (!(n >= 3.0)) throw std::invalid_argument("normalizers: n must be >= 3");
  const double ln = std::log(n);
  const double a = std::sqrt(2.0 * ln);
  const double b = a - (std::log(ln) + std::log(4.0 * std::numbers::pi)) / (2.0 * a);
  return {a, b};
}

namespace {

void check_kappa(double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("limit_H: kappa must be positive");
}

std::function<double(double)> h_integrand(double x, double kappa) {
  const double s = std::sqrt(2.0 * kappa);
  return [x, kappa, s](double z) { return std::exp(-std::exp(-x - kappa + s * z)); };
}

void check_equicorrelated(double n, double rho) {
  if (!(n >= 1.0)) throw std::invalid_argument("equicorrelated_max_cdf: N must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("equicorrelated_max_cdf: rho must lie in [0,1)");
}

std::function<double(double)> equicorrelated_integrand(double n, double rho, double w) {
  const double sr = std::sqrt(rho);
  const double scale = 1.0 / std::sqrt(1.0 - rho);
  return [n, sr, scale, w](double z) {
    const double lp = normal::log_cdf((w - sr * z) * scale);
    return lp == 0.0 ? 1.0 : std::exp(n * lp);
  };
}

}  // namespace

double limit_H(double x, double kappa) {
  check_kappa(kappa);
  return quadrature::default_rule().integrate(h_integrand(x, kappa));
}

double limit_H_adaptive(double x, double kappa) {
  check_kappa(kappa);
  return quadrature::normal_expectation_adaptive(h_integrand(x, kappa));
}

double gumbel_H0(double x) { return std::exp(-std::exp(-x)); }

double equicorrelated_max_cdf(double n, double rho, double w) {
  check_equicorrelated(n, rho);
  if (rho == 0.0) return equicorrelated_integrand(n, 0.0, w)(0.0);
  return quadrature::default_rule().integrate(equicorrelated_integrand(n, rho, w));
}

double equicorrelated_max_cdf_adaptive(double n, double rho, double w) {
  check_equicorrelated(n, rho);
  return quadrature::normal_expectation_adaptive(equicorrelated_integrand(n, rho, w));
}

double extremal_index(double gamma_or, double gamma_in) {
  if (!(gamma_or > 0.0 && gamma_or < 1.0 && gamma_in > 0.0 && gamma_in < 1.0)) {
    throw std::domain_error("extremal_index: gamma_or and gamma_in must lie in (0,1)");
  }
  const double theta = std::log(gamma_or) / std::log(gamma_in);
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw std::domain_error(fmt::format("extremal_index: theta = {} outside (0,1]; levels do not witness an extremal index", theta));
  }
  return theta;
}

ExtremalIndexWitness moving_max_extremal_index(const MovingMaxModel& model, const Dims& n, double gamma_in) {
  if (!(gamma_in > 0.0 && gamma_in < 1.0)) throw std::invalid_argument("moving_max_extremal_index: gamma_in must lie in (0,1)");
  double lo = 0.0;
  double hi = 1.0;
  switch (model.innovation.kind) {
    case InnovationLaw::Kind::kUniform:
      break;
    case InnovationLaw::Kind::kNormal:
      lo = -40.0;
      hi = 40.0;
      break;
    case InnovationLaw::Kind::kDiscrete:
      lo = model.innovation.atoms.front() - 1.0;
      hi = model.innovation.atoms.back();
      break;
  }
  const FieldModel field{model};
  const double cells = static_cast<double>(cell_count(n));
  // F(v)^{n*} = gamma_in  <=>  F(v) = gamma_in^{1/n*}.
  const double target = std::pow(gamma_in, 1.0 / cells);
  ExtremalIndexWitness w;
  w.level = solve_level([&field](double x) { return field.marginal_cdf(x); }, target, lo, hi);
  w.gamma_in = std::pow(field.marginal_cdf(w.level), cells);
  w.gamma_or = moving_max_block_cdf(model, n, w.level);
  w.theta = extremal_index(w.gamma_or, w.gamma_in);
  return w;
}

}  // namespace phantom
