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

#include "phantom/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace phantom {

double point_product(const LatticePoint& p) {
  double prod = 1.0;
  for (auto v : p) prod *= static_cast<double>(v);
  return prod;
}

MonotoneCurve::MonotoneCurve(std::string name, std::size_t d, std::uint64_t first, Fn fn,
                             std::optional<std::uint64_t> last)
    : name_(std::move(name)), d_(d), first_(first), last_(last), fn_(std::move(fn)) {
  if (d_ == 0) throw std::invalid_argument("MonotoneCurve: dimension must be positive");
  if (last_ && *last_ < first_) throw std::invalid_argument("MonotoneCurve: empty domain");
}

LatticePoint MonotoneCurve::operator()(std::uint64_t n) const {
  if (n < first_ || (last_ && n > *last_)) {
    throw std::out_of_range(fmt::format("curve {}: index {} outside its domain", name_, n));
  }
  return fn_(n);
}

std::vector<LatticePoint> MonotoneCurve::table(std::uint64_t horizon) const {
  std::vector<LatticePoint> out;
  for (std::uint64_t n = first_; n <= horizon; ++n) out.push_back((*this)(n));
  return out;
}

LatticePoint curve_psi_example(std::uint64_t n) {
  if (n < 3) throw std::invalid_argument(fmt::format("curve_psi_example: n = {} below 3", n));
  const double ln = std::log(static_cast<double>(n));
  // n/ln n increases for n > e, so on n >= 3 the running max of the raw
  // formula is the formula itself.
  return {static_cast<std::int64_t>(std::floor(static_cast<double>(n) / ln)), static_cast<std::int64_t>(std::floor(ln))};
}

LatticePoint curve_diagonal(std::uint64_t n, std::size_t d) { return LatticePoint(d, static_cast<std::int64_t>(n)); }

MonotoneCurve diagonal_curve(std::size_t d) {
  return MonotoneCurve("diagonal", d, 1, [d](std::uint64_t n) { return curve_diagonal(n, d); });
}

MonotoneCurve psi_example_curve() { return MonotoneCurve("psi_example", 2, 3, curve_psi_example); }

MonotoneCurve table_curve(std::vector<LatticePoint> table, std::string name) {
  if (table.empty()) throw std::invalid_argument("table_curve: empty table");
  const std::size_t d = table.front().size();
  for (const auto& p : table) {
    if (p.size() != d) throw std::invalid_argument("table_curve: ragged table");
  }
  const auto last = static_cast<std::uint64_t>(table.size());
  auto shared = std::make_shared<const std::vector<LatticePoint>>(std::move(table));
  return MonotoneCurve(std::move(name), d, 1, [shared](std::uint64_t n) { return (*shared)[n - 1]; }, last);
}

CurveReport validate_curve(const MonotoneCurve& psi, std::uint64_t horizon, double tol_ratio,
                           std::optional<std::uint64_t> n_ratio) {
  if (horizon < 2) throw std::invalid_argument("validate_curve: horizon must be >= 2");
  if (psi.last()) horizon = std::min(horizon, *psi.last());
  const std::uint64_t ratio_from = n_ratio.value_or(horizon / 2);
  CurveReport report;
  auto fail = [&report](CurveViolation::Kind kind, std::uint64_t n, std::string msg) {
    report.valid = false;
    report.violations.push_back({kind, n, std::move(msg)});
  };
  LatticePoint prev = psi(psi.first());
  const LatticePoint start = prev;
  bool monotone_reported = false;
  bool strict_reported = false;
  bool ratio_reported = false;
  for (std::uint64_t n = psi.first(); n < horizon; ++n) {
    LatticePoint next = psi(n + 1);
    bool monotone = true;
    for (std::size_t i = 0; i < prev.size(); ++i) monotone = monotone && prev[i] <= next[i];
    if (!monotone && !monotone_reported) {
      fail(CurveViolation::Kind::kNotMonotone, n, fmt::format("monotonicity violated: psi({}) > psi({}) in some coordinate", n, n + 1));
      monotone_reported = true;
    }
    if (next == prev && !strict_reported) {
      fail(CurveViolation::Kind::kNotStrict, n, fmt::format("strictness violated: psi({}) = psi({})", n, n + 1));
      strict_reported = true;
    }
    if (n >= ratio_from && !ratio_reported) {
      const double ratio = point_product(prev) / point_product(next);
      if (!(ratio >= 1.0 - tol_ratio)) {
        fail(CurveViolation::Kind::kRatio, n,
             fmt::format("ratio violated: psi({})*/psi({})* = {} < 1 - {}", n, n + 1, ratio, tol_ratio));
        ratio_reported = true;
      }
    }
    prev = std::move(next);
  }
  for (std::size_t i = 0; i < prev.size(); ++i) {
    if (!(prev[i] > start[i])) {
      fail(CurveViolation::Kind::kBounded, horizon,
           fmt::format("coordinate {} does not grow over [{}, {}]", i, psi.first(), horizon));
      break;
    }
  }
  return report;
}

namespace {

// Smallest j in [lo, hi] with pred(j) true, pred monotone false->true; hi+1 if none.
template <class Pred>
std::uint64_t first_true(std::uint64_t lo, std::uint64_t hi, Pred pred) {
  std::uint64_t a = lo;
  std::uint64_t b = hi + 1;
  while (a < b) {
    const std::uint64_t mid = a + (b - a) / 2;
    if (pred(mid)) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  return a;
}

}  // namespace

NeighborhoodReport in_neighborhood(const MonotoneCurve& phi, const MonotoneCurve& psi, double c,
                                   std::uint64_t horizon, const NeighborhoodOptions& options) {
  if (!(c >= 1.0)) throw std::invalid_argument("in_neighborhood: C must be >= 1");
  if (phi.dim() != psi.dim()) throw std::invalid_argument("in_neighborhood: dimension mismatch");
  const std::uint64_t n0 = std::max(options.n0, phi.first());
  if (phi.last()) horizon = std::min(horizon, *phi.last());
  const std::uint64_t j_lo = psi.first();
  const std::uint64_t j_hi = psi.last().value_or(options.search_limit);
  const auto cl = static_cast<long double>(c);

  NeighborhoodReport report;
  for (std::uint64_t n = n0; n <= horizon; ++n) {
    const LatticePoint target = phi(n);
    std::uint64_t lo = j_lo;
    std::uint64_t hi = j_hi;
    for (std::size_t i = 0; i < target.size() && lo <= hi; ++i) {
      const auto t = static_cast<long double>(target[i]);
      // psi_i(j) >= t / C holds on a final segment of j, psi_i(j) <= C t on an initial one.
      const std::uint64_t from = first_true(j_lo, j_hi, [&](std::uint64_t j) {
        return static_cast<long double>(psi(j)[i]) * cl >= t;
      });
      const std::uint64_t past = first_true(j_lo, j_hi, [&](std::uint64_t j) {
        return static_cast<long double>(psi(j)[i]) > cl * t;
      });
      lo = std::max(lo, from);
      if (past == 0) {
        hi = 0;
        lo = 1;
      } else {
        hi = std::min(hi, past - 1);
      }
    }
    if (lo > hi) {
      if (!report.first_failure) report.first_failure = n;
      report.last_failure = n;
    }
  }
  if (report.last_failure) {
    report.inside = options.allow_prefix && *report.last_failure < n0 + (horizon - n0) / 2;
  }
  return report;
}

MonotoneCurve densify_to_curve(const std::vector<LatticePoint>& m) {
  if (m.empty()) throw std::invalid_argument("densify_to_curve: empty sequence");
  const std::size_t d = m.front().size();
  std::vector<LatticePoint> path{m.front()};
  for (std::size_t k = 1; k < m.size(); ++k) {
    if (m[k].size() != d) throw std::invalid_argument("densify_to_curve: ragged sequence");
    bool increasing = m[k] != m[k - 1];
    for (std::size_t i = 0; i < d; ++i) increasing = increasing && m[k - 1][i] <= m[k][i];
    if (!increasing) {
      throw std::invalid_argument(fmt::format("densify_to_curve: m({}) -> m({}) is not a strict monotone step", k, k + 1));
    }
    LatticePoint cur = m[k - 1];
    for (std::size_t i = 0; i < d; ++i) {
      while (cur[i] < m[k][i]) {
        ++cur[i];
        path.push_back(cur);
      }
    }
  }
  return table_curve(std::move(path), "densified");
}

MonotoneCurve curve_from_json(const nlohmann::json& j, std::size_t d) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "diagonal") return diagonal_curve(d);
  if (kind == "psi_example") {
    if (d != 2) throw std::invalid_argument("curve psi_example is two-dimensional");
    return psi_example_curve();
  }
  if (kind == "table") {
    auto table = j.at("table").get<std::vector<LatticePoint>>();
    for (const auto& p : table) {
      if (p.size() != d) throw std::invalid_argument(fmt::format("curve table point has {} coordinates, expected {}", p.size(), d));
    }
    return table_curve(std::move(table));
  }
  throw std::invalid_argument("unknown curve kind: " + kind);
}

}  // namespace phantom
