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

#include "phantom/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "phantom/normal.hpp"
#include "phantom/parallel.hpp"

namespace phantom {

namespace {

// All k-tuples of nonnegative integers with sum <= bound.
std::vector<std::vector<std::size_t>> compositions(std::size_t bound, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(k, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, bound);
  return out;
}

using RectKey = std::pair<LatticePoint, LatticePoint>;

void check_splits(const std::vector<BlockSplit>& splits, std::size_t k, const Dims& bound) {
  for (const auto& s : splits) {
    if (s.k() != k) throw std::invalid_argument(fmt::format("beta: split has {} parts, expected {}", s.k(), k));
    const Dims total = s.total();
    if (total.size() != bound.size()) throw std::invalid_argument("beta: split dimension mismatch");
    for (std::size_t i = 0; i < bound.size(); ++i) {
      if (total[i] > bound[i]) {
        throw std::invalid_argument(
            fmt::format("beta: split total {} on axis {} exceeds T psi(n) bound {}", total[i], i, bound[i]));
      }
    }
  }
}

}  // namespace

Dims BlockSplit::total() const {
  if (parts.empty()) return {};
  Dims sum(parts.front().size(), 0);
  for (const auto& p : parts) {
    if (p.size() != sum.size()) throw std::invalid_argument("BlockSplit: ragged parts");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p[i];
  }
  return sum;
}

std::vector<Rectangle> BlockSplit::blocks() const {
  const std::size_t kk = k();
  if (kk == 0) return {};
  const std::size_t d = parts.front().size();
  // offsets[i][l] = sum of parts[0..l-1][i]
  std::vector<std::vector<std::int64_t>> offsets(d, std::vector<std::int64_t>(kk + 1, 0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t l = 0; l < kk; ++l) offsets[i][l + 1] = offsets[i][l] + static_cast<std::int64_t>(parts[l][i]);
  }
  std::vector<Rectangle> out;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Rectangle r;
    for (std::size_t i = 0; i < d; ++i) {
      r.lo.push_back(offsets[i][idx[i]] + 1);
      r.hi.push_back(offsets[i][idx[i] + 1]);
    }
    out.push_back(std::move(r));
    std::size_t axis = 0;
    while (axis < d && idx[axis] == kk - 1) idx[axis++] = 0;
    if (axis == d) break;
    ++idx[axis];
  }
  return out;
}

Dims split_bound(const LatticePoint& psi_n, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("split_bound: T must be positive");
  Dims out;
  for (auto v : psi_n) out.push_back(static_cast<std::size_t>(std::floor(t * static_cast<double>(v))));
  return out;
}

std::vector<BlockSplit> all_splits(const Dims& bound, std::size_t k) {
  if (k < 2) throw std::invalid_argument("all_splits: k must be >= 2");
  std::vector<std::vector<std::vector<std::size_t>>> per_axis;
  for (auto b : bound) per_axis.push_back(compositions(b, k));
  std::vector<BlockSplit> out;
  std::vector<std::size_t> idx(bound.size(), 0);
  while (true) {
    BlockSplit s;
    s.parts.assign(k, Dims(bound.size(), 0));
    for (std::size_t i = 0; i < bound.size(); ++i) {
      for (std::size_t l = 0; l < k; ++l) s.parts[l][i] = per_axis[i][idx[i]][l];
    }
    out.push_back(std::move(s));
    std::size_t axis = 0;
    while (axis < bound.size() && idx[axis] + 1 == per_axis[axis].size()) idx[axis++] = 0;
    if (axis == bound.size()) break;
    ++idx[axis];
  }
  return out;
}

std::vector<BlockSplit> default_split_grid(const Dims& bound) {
  const std::size_t d = bound.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> per_axis(d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t n = bound[i];
    std::vector<std::size_t> grid{0, n / 4, n / 2, 3 * n / 4, n};
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (auto p : grid) {
      for (auto q : grid) {
        if (p + q <= n) per_axis[i].emplace_back(p, q);
      }
    }
  }
  std::vector<BlockSplit> out;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    BlockSplit s;
    s.parts.assign(2, Dims(d, 0));
    for (std::size_t i = 0; i < d; ++i) {
      s.parts[0][i] = per_axis[i][idx[i]].first;
      s.parts[1][i] = per_axis[i][idx[i]].second;
    }
    out.push_back(std::move(s));
    std::size_t axis = 0;
    while (axis < d && idx[axis] + 1 == per_axis[axis].size()) idx[axis++] = 0;
    if (axis == d) break;
    ++idx[axis];
  }
  return out;
}

BetaReport beta_from_probabilities(const std::vector<BlockSplit>& splits, const BlockProbability& prob) {
  BetaReport report;
  report.grid_size = splits.size();
  if (!splits.empty()) report.k = splits.front().k();
  report.value = 0.0;
  for (const auto& s : splits) {
    const double joint = prob(Rectangle::from_origin(s.total()));
    double product = 1.0;
    for (const auto& block : s.blocks()) {
      if (!block.empty()) product *= prob(block);
    }
    const double value = std::abs(joint - product);
    if (!report.argmax || value > report.value) {
      report.value = value;
      report.argmax = s;
    }
  }
  return report;
}

BetaReport beta_k_estimate(const FieldModel& model, const LatticePoint& psi_n, double level, double t, std::size_t k,
                           const std::vector<BlockSplit>& splits, std::size_t reps, std::uint64_t seed,
                           std::size_t workers) {
  if (k < 2) throw std::invalid_argument("beta: k must be >= 2");
  if (reps == 0) throw std::invalid_argument("beta: reps must be >= 1");
  const Dims bound = split_bound(psi_n, t);
  check_splits(splits, k, bound);

  // Distinct nonempty rectangles and the extent they need.
  std::map<RectKey, std::size_t> slots;
  Dims extent(bound.size(), 0);
  auto register_rect = [&](const Rectangle& r) {
    if (r.empty()) return;
    slots.emplace(RectKey{r.lo, r.hi}, slots.size());
    for (std::size_t i = 0; i < extent.size(); ++i) extent[i] = std::max(extent[i], static_cast<std::size_t>(r.hi[i]));
  };
  for (const auto& s : splits) {
    register_rect(Rectangle::from_origin(s.total()));
    for (const auto& b : s.blocks()) register_rect(b);
  }
  BetaReport report;
  report.mode = BetaMode::kMonteCarlo;
  report.k = k;
  report.grid_size = splits.size();
  if (slots.empty()) return report;

  std::vector<std::pair<Rectangle, std::size_t>> rects;
  for (const auto& [key, slot] : slots) rects.push_back({Rectangle{key.first, key.second}, slot});
  const FieldSampler sampler(model, extent);
  std::vector<std::vector<char>> hits(reps, std::vector<char>(slots.size(), 0));
  parallel_for(reps, workers, [&](std::size_t r) {
    const FieldSample field = sampler.draw(substream_seed(seed, r));
    for (const auto& [rect, slot] : rects) hits[r][slot] = block_max(field, rect) <= level ? 1 : 0;
  });
  std::vector<double> p_hat(slots.size(), 0.0);
  for (const auto& row : hits) {
    for (std::size_t s = 0; s < row.size(); ++s) p_hat[s] += row[s];
  }
  for (auto& p : p_hat) p /= static_cast<double>(reps);

  auto prob = [&](const Rectangle& r) {
    if (r.empty()) return 1.0;
    return p_hat[slots.at(RectKey{r.lo, r.hi})];
  };
  const BetaReport exact_form = beta_from_probabilities(splits, prob);
  report.value = exact_form.value;
  report.argmax = exact_form.argmax;

  const auto rr = static_cast<double>(reps);
  const BlockSplit& s = *report.argmax;
  const double joint = prob(Rectangle::from_origin(s.total()));
  std::vector<double> factors;
  for (const auto& b : s.blocks()) {
    if (!b.empty()) factors.push_back(prob(b));
  }
  double var_product = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    double others = 1.0;
    for (std::size_t j = 0; j < factors.size(); ++j) {
      if (j != i) others *= factors[j];
    }
    var_product += others * others * factors[i] * (1.0 - factors[i]) / rr;
  }
  report.standard_error = std::sqrt(joint * (1.0 - joint) / rr) + std::sqrt(var_product);
  return report;
}

BetaReport beta_estimate(const FieldModel& model, const LatticePoint& psi_n, double level, double t,
                         const std::vector<BlockSplit>& splits, std::size_t reps, std::uint64_t seed,
                         std::size_t workers) {
  return beta_k_estimate(model, psi_n, level, t, 2, splits, reps, seed, workers);
}

BlockProbability exact_block_probability(const FieldModel& model, double level) {
  if (const auto* iid = std::get_if<IidModel>(&model.kind)) {
    const double f = iid->marginal.cdf(level);
    return [f](const Rectangle& r) {
      if (r.empty()) return 1.0;
      const double cells = static_cast<double>(r.cells());
      if (f <= 0.0) return 0.0;
      return std::exp(cells * std::log(f));
    };
  }
  if (const auto* mm = std::get_if<MovingMaxModel>(&model.kind)) {
    const MovingMaxModel copy = *mm;
    return [copy, level](const Rectangle& r) {
      if (r.empty()) return 1.0;
      Dims n;
      for (std::size_t i = 0; i < r.lo.size(); ++i) n.push_back(static_cast<std::size_t>(r.hi[i] - r.lo[i] + 1));
      return moving_max_block_cdf(copy, n, level);
    };
  }
  throw std::invalid_argument("exact_block_probability: no closed form for " + model.name());
}

MovingMaxEnumeration::MovingMaxEnumeration(const MovingMaxModel& model, const Dims& extent, double level,
                                           std::size_t max_sites)
    : extent_(extent) {
  const auto& law = model.innovation;
  if (law.kind != InnovationLaw::Kind::kDiscrete) throw std::invalid_argument("enumeration needs discrete innovations");
  const std::size_t d = extent.size();
  if (model.window.size() != d) throw std::invalid_argument("enumeration: window dimension mismatch");
  Dims site_dims(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (extent[i] == 0) throw std::invalid_argument("enumeration: extent must be >= 1 componentwise");
    site_dims[i] = extent[i] + model.window[i] - 1;
  }
  sites_ = cell_count(site_dims);
  const std::size_t cells = cell_count(extent);
  if (sites_ > max_sites) throw std::invalid_argument(fmt::format("enumeration: {} sites exceed the cap {}", sites_, max_sites));
  if (cells > 64) throw std::invalid_argument("enumeration: at most 64 field cells");
  const std::size_t atoms = law.atoms.size();
  const double configs = std::pow(static_cast<double>(atoms), static_cast<double>(sites_));
  if (configs > 4.3e9) throw std::invalid_argument("enumeration: too many configurations");

  // Sub-rectangles [lo, hi] of the extent, indexed per axis by (lo-1)*e + (hi-1).
  std::size_t rect_count = 1;
  for (auto e : extent) rect_count *= e * e;
  std::vector<std::uint64_t> rect_mask(rect_count, 0);
  std::vector<bool> rect_valid(rect_count, false);
  for (std::size_t code = 0; code < rect_count; ++code) {
    std::size_t rest = code;
    LatticePoint lo(d), hi(d);
    bool valid = true;
    for (std::size_t i = d; i-- > 0;) {
      const std::size_t e = extent[i];
      const std::size_t axis_code = rest % (e * e);
      rest /= e * e;
      lo[i] = static_cast<std::int64_t>(axis_code / e) + 1;
      hi[i] = static_cast<std::int64_t>(axis_code % e) + 1;
      valid = valid && lo[i] <= hi[i];
    }
    if (!valid) continue;
    rect_valid[code] = true;
    std::vector<std::int64_t> idx(lo);
    while (true) {
      std::size_t cell = 0;
      for (std::size_t i = 0; i < d; ++i) cell = cell * extent[i] + static_cast<std::size_t>(idx[i] - 1);
      rect_mask[code] |= std::uint64_t{1} << cell;
      std::size_t axis = d;
      bool done = true;
      while (axis-- > 0) {
        if (idx[axis] < hi[axis]) {
          ++idx[axis];
          done = false;
          break;
        }
        idx[axis] = lo[axis];
      }
      if (done) break;
    }
  }

  std::vector<long double> acc(rect_count, 0.0L);
  std::vector<std::size_t> config(sites_, 0);
  std::vector<double> z(sites_);
  std::vector<double> field(cells);
  std::vector<std::size_t> cell_idx(d);
  while (true) {
    long double weight = 1.0L;
    for (std::size_t s = 0; s < sites_; ++s) {
      z[s] = law.atoms[config[s]];
      weight *= law.probs[config[s]];
    }
    // Field value at each cell: max of z over the window box.
    std::uint64_t above = 0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t rest = cell;
      for (std::size_t i = d; i-- > 0;) {
        cell_idx[i] = rest % extent[i];
        rest /= extent[i];
      }
      double best = -std::numeric_limits<double>::infinity();
      std::vector<std::size_t> off(d, 0);
      while (true) {
        std::size_t site = 0;
        for (std::size_t i = 0; i < d; ++i) site = site * site_dims[i] + cell_idx[i] + off[i];
        best = std::max(best, z[site]);
        std::size_t axis = d;
        bool done = true;
        while (axis-- > 0) {
          if (off[axis] + 1 < model.window[axis]) {
            ++off[axis];
            done = false;
            break;
          }
          off[axis] = 0;
        }
        if (done) break;
      }
      field[cell] = best;
      if (best > level) above |= std::uint64_t{1} << cell;
    }
    for (std::size_t code = 0; code < rect_count; ++code) {
      if (rect_valid[code] && (above & rect_mask[code]) == 0) acc[code] += weight;
    }
    std::size_t s = 0;
    while (s < sites_ && config[s] + 1 == atoms) config[s++] = 0;
    if (s == sites_) break;
    ++config[s];
  }
  probs_.assign(rect_count, 1.0);
  for (std::size_t code = 0; code < rect_count; ++code) {
    if (rect_valid[code]) probs_[code] = static_cast<double>(acc[code]);
  }
}

std::size_t MovingMaxEnumeration::index_of(const Rectangle& r) const {
  std::size_t code = 0;
  for (std::size_t i = 0; i < extent_.size(); ++i) {
    const std::size_t e = extent_[i];
    if (r.lo[i] < 1 || static_cast<std::size_t>(r.hi[i]) > e) {
      throw std::out_of_range("MovingMaxEnumeration: rectangle outside the enumerated extent");
    }
    code = code * e * e + static_cast<std::size_t>(r.lo[i] - 1) * e + static_cast<std::size_t>(r.hi[i] - 1);
  }
  return code;
}

double MovingMaxEnumeration::probability(const Rectangle& r) const {
  if (r.lo.size() != extent_.size()) throw std::invalid_argument("MovingMaxEnumeration: dimension mismatch");
  if (r.empty()) return 1.0;
  return probs_[index_of(r)];
}

BlockProbability MovingMaxEnumeration::as_function() const {
  return [this](const Rectangle& r) { return probability(r); };
}

BlockGrowthCheck check_block_growth(const BlockProbability& prob, const Dims& bound, std::size_t k, double tolerance) {
  BlockGrowthCheck check;
  check.beta2 = beta_from_probabilities(all_splits(bound, 2), prob).value;
  check.betak = beta_from_probabilities(all_splits(bound, k), prob).value;
  check.bound = std::pow(static_cast<double>(k), static_cast<double>(bound.size())) * check.beta2;
  check.holds = check.betak <= check.bound + tolerance;
  return check;
}

double LRule::evaluate(double delta) const {
  if (kind == Kind::kConstant) return value;
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("LRule: delta must lie in [0,1)");
  return 1.0 / (2.0 * std::numbers::pi * std::sqrt(1.0 - delta * delta));
}

std::string LRule::describe() const {
  if (kind == Kind::kConstant) return fmt::format("constant({:.17g})", value);
  return "standard: 1/(2 pi sqrt(1 - delta^2))";
}

namespace {

struct BermanSetup {
  double delta;
  double alpha;
  double l_value;
  std::int64_t a_from;
  double prefactor;
};

BermanSetup berman_setup(const SeparableCovariance& c, std::uint64_t n, double u, const LRule& rule,
                         std::optional<double> alpha) {
  if (!(u > 0.0)) throw std::invalid_argument("berman_bound: u must be positive");
  if (n < 1) throw std::invalid_argument("berman_bound: n must be >= 1");
  BermanSetup s;
  s.delta = delta_sup(c, 1).delta;
  if (alpha) {
    s.alpha = *alpha;
  } else {
    const double top = (1.0 - 3.0 * s.delta) / (1.0 + s.delta);
    s.alpha = top > 0.0 ? 0.5 * top : std::numeric_limits<double>::quiet_NaN();
  }
  s.l_value = rule.evaluate(s.delta);
  const auto nd = static_cast<double>(n);
  s.a_from = std::isnan(s.alpha) ? std::numeric_limits<std::int64_t>::max()
                                 : static_cast<std::int64_t>(std::ceil(std::pow(nd, s.alpha)));
  const auto d = static_cast<double>(c.dim());
  s.prefactor = std::pow(2.0, d) * s.l_value * std::pow(nd, d);
  return s;
}

BermanReport finish(const BermanSetup& s, long double sigma1, long double sigma2, const LRule& rule) {
  BermanReport report;
  report.sigma1 = static_cast<double>(sigma1);
  report.sigma2 = static_cast<double>(sigma2);
  report.sum = static_cast<double>(sigma1 + sigma2);
  report.bound = s.prefactor * report.sum;
  report.alpha = s.alpha;
  report.delta = s.delta;
  report.l_value = s.l_value;
  report.l_rule = rule.describe();
  return report;
}

}  // namespace

BermanReport berman_bound(const SeparableCovariance& c, std::uint64_t n, double u, const LRule& rule,
                          std::optional<double> alpha) {
  const BermanSetup s = berman_setup(c, n, u, rule, alpha);
  const std::size_t d = c.dim();
  const auto top = static_cast<std::int64_t>(n);
  const double u2 = u * u;
  long double sigma1 = 0.0L;
  long double sigma2 = 0.0L;
  LatticePoint k(d, 0);
  while (true) {
    std::size_t axis = 0;
    while (axis < d && k[axis] == top) k[axis++] = 0;
    if (axis == d) break;
    ++k[axis];
    const double r = covariance_at(c, k);
    const double term = r * std::exp(-u2 / (1.0 + r));
    const bool in_a = std::all_of(k.begin(), k.end(), [&](std::int64_t v) { return v >= s.a_from; });
    (in_a ? sigma1 : sigma2) += term;
  }
  return finish(s, sigma1, sigma2, rule);
}

BermanReport berman_bound_factored(const SeparableCovariance& c, std::uint64_t n, double u, const LRule& rule,
                                   std::optional<double> alpha) {
  const BermanSetup s = berman_setup(c, n, u, rule, alpha);
  const std::size_t d = c.dim();
  const std::size_t len = static_cast<std::size_t>(n) + 1;
  std::vector<std::vector<double>> table(d, std::vector<double>(len));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t t = 0; t < len; ++t) table[i][t] = c.axis(i)(static_cast<double>(t));
  }
  const double u2 = u * u;
  // Walk the outer d-1 axes; each innermost row is summed from the cached
  // prefix product of the outer coordinates.
  long double sigma1 = 0.0L;
  long double sigma2 = 0.0L;
  std::vector<std::size_t> outer(d - 1, 0);
  const auto a_from = s.a_from;
  while (true) {
    double prefix = 1.0;
    bool outer_origin = true;
    bool outer_in_a = true;
    for (std::size_t i = 0; i + 1 < d; ++i) {
      prefix *= table[i][outer[i]];
      outer_origin = outer_origin && outer[i] == 0;
      outer_in_a = outer_in_a && static_cast<std::int64_t>(outer[i]) >= a_from;
    }
    long double row_a = 0.0L;
    long double row_b = 0.0L;
    const auto& last = table[d - 1];
    for (std::size_t t = outer_origin ? 1 : 0; t < len; ++t) {
      const double r = prefix * last[t];
      const double term = r * std::exp(-u2 / (1.0 + r));
      (outer_in_a && static_cast<std::int64_t>(t) >= a_from ? row_a : row_b) += term;
    }
    sigma1 += row_a;
    sigma2 += row_b;
    std::size_t axis = 0;
    while (axis + 1 < d && outer[axis] + 1 == len) outer[axis++] = 0;
    if (axis + 1 >= d) break;
    ++outer[axis];
  }
  return finish(s, sigma1, sigma2, rule);
}

BoundCheck bound_vs_empirical(const EmpiricalLaw& law, const FieldModel& model, std::uint64_t n, double u,
                              const LRule& rule) {
  BoundCheck check;
  const std::size_t d = law.dims().size();
  if (d == 0) throw std::invalid_argument("bound_vs_empirical: law carries no rectangle size");
  for (auto v : law.dims()) {
    if (v != n) throw std::invalid_argument("bound_vs_empirical: law was not taken over [1, n]^d");
  }
  if (const auto* g = std::get_if<GaussianSeparableModel>(&model.kind)) {
    if (g->covariance.dim() != d) throw std::invalid_argument("bound_vs_empirical: dimension mismatch");
    check.bound = berman_bound(g->covariance, n, u, rule).bound;
  } else if (const auto* iid = std::get_if<IidModel>(&model.kind);
             iid && iid->marginal.kind == InnovationLaw::Kind::kNormal) {
    check.bound = 0.0;
  } else {
    throw std::invalid_argument("bound_vs_empirical: needs a Gaussian separable or i.i.d. normal model");
  }
  const double cells = std::pow(static_cast<double>(n), static_cast<double>(d));
  check.empirical = law.cdf(u);
  check.reference = std::exp(cells * normal::log_cdf(u));
  check.gap = std::abs(check.empirical - check.reference);
  check.standard_error =
      std::sqrt(check.empirical * (1.0 - check.empirical) / static_cast<double>(law.replications()));
  check.verdict = check.gap <= check.bound + 3.0 * check.standard_error;
  return check;
}

BoundCheck bound_vs_empirical(const FieldModel& model, std::uint64_t n, double u, std::size_t reps, std::uint64_t seed,
                              const LRule& rule, std::size_t d, std::size_t workers) {
  if (const auto* g = std::get_if<GaussianSeparableModel>(&model.kind)) d = g->covariance.dim();
  const Dims dims(d, static_cast<std::size_t>(n));
  return bound_vs_empirical(empirical_max_law(model, dims, reps, seed, workers), model, n, u, rule);
}

}  // namespace phantom
