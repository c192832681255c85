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

#include "phantom/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

namespace phantom {

namespace {

double loglog_over_log(double k) { return std::log(std::log(k)) / std::log(k); }

double eta1_knot1_factor() { return 27.0 * loglog_over_log(27.0) - 26.0 * loglog_over_log(28.0); }

double eta2_knot1_factor() { return 2.0 / std::log(2.0) - 1.0 / std::log(3.0); }

// Sign of (b.v - a.v)(c.t - b.t) - (c.v - b.v)(b.t - a.t), i.e. of
// slope(a,b) - slope(b,c) scaled by positive gaps. Exact.
int slope_order(const Knot& a, const Knot& b, const Knot& c) {
  const double lhs = (b.v - a.v) * (c.t - b.t);
  const double rhs = (c.v - b.v) * (b.t - a.t);
  // Each side carries three roundings; 8u bounds the accumulated error.
  const double bound = 8.0 * std::numeric_limits<double>::epsilon() * 0.5 * (std::abs(lhs) + std::abs(rhs));
  const double diff = lhs - rhs;
  if (diff > bound) return 1;
  if (diff < -bound) return -1;
  using boost::multiprecision::cpp_rational;
  const cpp_rational exact = (cpp_rational(b.v) - cpp_rational(a.v)) * (cpp_rational(c.t) - cpp_rational(b.t)) -
                             (cpp_rational(c.v) - cpp_rational(b.v)) * (cpp_rational(b.t) - cpp_rational(a.t));
  return exact.sign();
}

}  // namespace

double TailRule::at_integer(double k) const {
  switch (kind) {
    case Kind::kLogLogOverLog:
      return eta1_closed_form(scale, k);
    case Kind::kInverseLog:
      return eta2_closed_form(scale, k);
    case Kind::kFlat:
      break;
  }
  throw std::logic_error("TailRule::at_integer on a flat tail");
}

CharacteristicPolygon::CharacteristicPolygon(std::vector<Knot> knots, TailRule tail) : tail_(tail) {
  if (knots.empty()) throw std::invalid_argument("CharacteristicPolygon: no knots");
  if (!(knots.front().t >= 0.0)) throw std::invalid_argument("CharacteristicPolygon: negative abscissa");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].t > knots[i - 1].t)) {
      throw std::invalid_argument(
          fmt::format("CharacteristicPolygon: abscissae not strictly increasing at knot {}", i));
    }
  }
  knots_ = std::make_shared<const std::vector<Knot>>(std::move(knots));
}

double CharacteristicPolygon::operator()(double t) const {
  t = std::abs(t);
  const auto& k = *knots_;
  if (t <= k.back().t) {
    if (t <= k.front().t) return k.front().v;
    const auto it = std::upper_bound(k.begin(), k.end(), t, [](double x, const Knot& n) { return x < n.t; });
    const Knot& hi = *it;
    const Knot& lo = *(it - 1);
    if (t == lo.t) return lo.v;
    const double w = (t - lo.t) / (hi.t - lo.t);
    return lo.v + w * (hi.v - lo.v);
  }
  if (tail_.kind == TailRule::Kind::kFlat) return k.back().v;
  const double base = std::floor(t);
  const double lo = base <= k.back().t ? k.back().v : tail_.at_integer(base);
  if (t == base) return lo;
  const double hi = tail_.at_integer(base + 1.0);
  return lo + (t - base) * (hi - lo);
}

PolyaReport validate_polya(const CharacteristicPolygon& polygon) {
  PolyaReport report;
  auto fail = [&report](std::string msg) {
    report.valid = false;
    report.diagnostics.push_back(std::move(msg));
  };
  const auto knots = polygon.knots();
  if (knots.front().t != 0.0 || knots.front().v != 1.0) fail("origin violated: first knot must be (0,1)");

  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i].v > 0.0)) {
      fail(fmt::format("positivity violated at knot {} (t={})", i, knots[i].t));
      break;
    }
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].v > knots[i - 1].v) {
      fail(fmt::format("nonincreasing violated at knot {} (t={})", i, knots[i].t));
      break;
    }
  }
  for (std::size_t i = 2; i < knots.size(); ++i) {
    if (slope_order(knots[i - 2], knots[i - 1], knots[i]) > 0) {
      fail(fmt::format("convexity violated at knot {} (t={})", i - 1, knots[i - 1].t));
      break;
    }
  }

  const auto& tail = polygon.tail();
  if (tail.kind != TailRule::Kind::kFlat) {
    const Knot last = knots.back();
    const Knot next{std::floor(last.t) + 1.0, tail.at_integer(std::floor(last.t) + 1.0)};
    if (!(next.v > 0.0)) fail("positivity violated in tail");
    if (next.v > last.v) fail("nonincreasing violated at tail junction");
    if (knots.size() >= 2 && slope_order(knots[knots.size() - 2], last, next) > 0) {
      fail("convexity violated at tail junction");
    }
  }
  return report;
}

double eta1_closed_form(double gamma1, double k) { return gamma1 * std::log(std::log(k)) / std::log(k); }

double eta2_closed_form(double gamma2, double k) { return gamma2 / std::log(k); }

CharacteristicPolygon build_eta1(double gamma1, std::size_t horizon) {
  if (!(gamma1 > 0.0 && gamma1 < 1.0)) throw std::invalid_argument("build_eta1: gamma1 must lie in (0,1)");
  if (horizon < 28) throw std::invalid_argument("build_eta1: horizon must be at least 28");
  std::vector<Knot> knots;
  knots.reserve(horizon - 25);
  knots.push_back({0.0, 1.0});
  knots.push_back({1.0, gamma1 * eta1_knot1_factor()});
  for (std::size_t k = 28; k <= horizon; ++k) {
    const auto kd = static_cast<double>(k);
    knots.push_back({kd, eta1_closed_form(gamma1, kd)});
  }
  CharacteristicPolygon polygon(std::move(knots), {TailRule::Kind::kLogLogOverLog, gamma1});
  if (auto report = validate_polya(polygon); !report) {
    throw std::invalid_argument("build_eta1: infeasible gamma1: " + report.diagnostics.front());
  }
  return polygon;
}

CharacteristicPolygon build_eta2(double gamma2, std::size_t horizon) {
  if (!(gamma2 > 0.0 && gamma2 < 1.0)) throw std::invalid_argument("build_eta2: gamma2 must lie in (0,1)");
  if (horizon < 3) throw std::invalid_argument("build_eta2: horizon must be at least 3");
  std::vector<Knot> knots;
  knots.reserve(horizon);
  knots.push_back({0.0, 1.0});
  knots.push_back({1.0, gamma2 * eta2_knot1_factor()});
  for (std::size_t k = 3; k <= horizon; ++k) {
    const auto kd = static_cast<double>(k);
    knots.push_back({kd, eta2_closed_form(gamma2, kd)});
  }
  CharacteristicPolygon polygon(std::move(knots), {TailRule::Kind::kInverseLog, gamma2});
  if (auto report = validate_polya(polygon); !report) {
    throw std::invalid_argument("build_eta2: infeasible gamma2: " + report.diagnostics.front());
  }
  return polygon;
}

double delta_threshold(double gamma1) { return (1.0 - 2.0 * gamma1) / (1.0 + 2.0 * gamma1); }

bool validate_gammas(const GammaPair& g) {
  if (!(g.gamma1 > 0.25 && g.gamma1 < 1.0 && g.gamma2 > 0.0 && g.gamma2 < 1.0)) return false;
  const double left = g.gamma1 * eta1_knot1_factor();
  const double middle = g.gamma2 * eta2_knot1_factor();
  return left < middle && middle < delta_threshold(g.gamma1);
}

}  // namespace phantom
