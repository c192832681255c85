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

#include "phantom/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phantom/normal.hpp"

namespace phantom::quadrature {

double GaussHermiteRule::integrate(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
  return sum;
}

GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite: need at least one node");
  // Orthonormal Hermite polynomials for the N(0,1) weight:
  // q_{k+1}(x) = (x q_k(x) - sqrt(k) q_{k-1}(x)) / sqrt(k+1).
  auto evaluate = [n](double x, double& qn, double& qn1, double& christoffel) {
    double prev = 0.0;
    double cur = 1.0;
    christoffel = 1.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double kd = static_cast<double>(k);
      const double next = (x * cur - std::sqrt(kd) * prev) / std::sqrt(kd + 1.0);
      prev = cur;
      cur = next;
      christoffel += cur * cur;
    }
    qn1 = cur;
    const double nd = static_cast<double>(n - 1);
    qn = (x * cur - std::sqrt(nd) * prev) / std::sqrt(nd + 1.0);
  };

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (Eigen::Index k = 0; k < sub.size(); ++k) sub[k] = std::sqrt(static_cast<double>(k + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigenvalue solver failed");

  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    double qn = 0.0, qn1 = 0.0, c = 0.0;
    for (int iter = 0; iter < 8; ++iter) {
      evaluate(x, qn, qn1, c);
      const double step = qn / (std::sqrt(static_cast<double>(n)) * qn1);
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    evaluate(x, qn, qn1, c);
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / c;
  }
  // Symmetrize to remove rounding asymmetry.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const GaussHermiteRule& default_rule() {
  static const GaussHermiteRule rule = gauss_hermite(200);
  return rule;
}

double normal_expectation_adaptive(const std::function<double(double)>& f, double rel_tol, double lim) {
  auto integrand = [&f](double z) { return f(z) * normal::pdf(z); };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -lim, lim, 30, rel_tol, &error);
  return value;
}

}  // namespace phantom::quadrature
