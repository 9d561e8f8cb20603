// Copyright 2026 The Lorentz Tubes Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic fan-out. Work item i always draws from the stream seeded by
// (seed, i) and writes only slot i, so results never depend on how many
// workers ran.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "lorentz/world.hpp"

namespace lorentz {

/// Default worker count: $LORENTZ_WORKERS if set, else the hardware count.
inline int default_workers() {
  if (const char* env = std::getenv("LORENTZ_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// RNG for work item `index` under `seed`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(hash_combine(mix64(seed), index));
}

/// Uniform double in [0, 1); spelled out so the stream is identical across
/// standard libraries.
inline double uniform01(std::mt19937_64& rng) { return to_unit_interval(rng()); }

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
/// thrown by any item is rethrown after all threads join.
template <class F>
void parallel_for(std::int64_t n, int workers, F&& fn) {
  if (n <= 0) return;
  workers = std::max(1, std::min<int>(workers, int(std::min<std::int64_t>(n, 1 << 16))));
  if (workers == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lorentz
