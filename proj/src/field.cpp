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

#include "phantom/field.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <exception>
#include <atomic>
#include <mutex>

#include <fmt/format.h>

#include "phantom/parallel.hpp"

namespace phantom {

std::size_t cell_count(std::span<const std::size_t> dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

FieldSample::FieldSample(Dims d, std::uint64_t s) : dims(std::move(d)), values(cell_count(dims)), seed(s) {}

double FieldSample::at(std::span<const std::int64_t> index) const {
  if (index.size() != dims.size()) throw std::out_of_range("FieldSample::at: dimension mismatch");
  std::size_t offset = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (index[i] < 1 || static_cast<std::size_t>(index[i]) > dims[i]) {
      throw std::out_of_range(fmt::format("FieldSample::at: coordinate {} = {} outside [1, {}]", i, index[i], dims[i]));
    }
    offset = offset * dims[i] + static_cast<std::size_t>(index[i] - 1);
  }
  return values[offset];
}

double FieldSample::max() const {
  if (values.empty()) return kEmptyMax;
  return *std::max_element(values.begin(), values.end());
}

bool Rectangle::empty() const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) return true;
  }
  return false;
}

std::size_t Rectangle::cells() const {
  if (empty()) return 0;
  std::size_t n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) n *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
  return n;
}

Rectangle Rectangle::from_origin(std::span<const std::size_t> n) {
  Rectangle r;
  for (auto v : n) {
    r.lo.push_back(1);
    r.hi.push_back(static_cast<std::int64_t>(v));
  }
  return r;
}

double block_max(const FieldSample& sample, const Rectangle& r) {
  const std::size_t d = sample.dims.size();
  if (r.lo.size() != d || r.hi.size() != d) throw std::out_of_range("block_max: rectangle dimension mismatch");
  if (r.empty()) return kEmptyMax;
  for (std::size_t i = 0; i < d; ++i) {
    if (r.lo[i] < 1 || static_cast<std::size_t>(r.hi[i]) > sample.dims[i]) {
      throw std::out_of_range(fmt::format("block_max: axis {} range [{}, {}] exceeds [1, {}]", i, r.lo[i], r.hi[i],
                                          sample.dims[i]));
    }
  }
  // Walk all fibers along the last axis.
  std::vector<std::int64_t> idx(r.lo.begin(), r.lo.end());
  const auto run = static_cast<std::size_t>(r.hi[d - 1] - r.lo[d - 1] + 1);
  double best = kEmptyMax;
  while (true) {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < d; ++i) offset = offset * sample.dims[i] + static_cast<std::size_t>(idx[i] - 1);
    const double* p = sample.values.data() + offset;
    for (std::size_t k = 0; k < run; ++k) best = std::max(best, p[k]);
    if (d == 1) break;
    std::size_t axis = d - 1;
    bool done = true;
    while (axis-- > 0) {
      if (idx[axis] < r.hi[axis]) {
        ++idx[axis];
        done = false;
        break;
      }
      idx[axis] = r.lo[axis];
    }
    if (done) break;
  }
  return best;
}

void write_csv(std::ostream& out, const FieldSample& sample) {
  std::string dims;
  for (std::size_t i = 0; i < sample.dims.size(); ++i) dims += (i ? "x" : "") + std::to_string(sample.dims[i]);
  out << "# dims=" << dims << " seed=" << sample.seed << '\n';
  const std::size_t row = sample.dims.empty() ? 0 : sample.dims.back();
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    out << fmt::format("{:.17g}", sample.values[i]) << ((i + 1) % row == 0 ? '\n' : ',');
  }
}

std::size_t resolve_workers(std::size_t workers) {
  if (workers > 0) return workers;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::min(resolve_workers(workers), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace phantom
