// Copyright 2026 The esdf authors
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

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace esdf {

// Runs fn(i) for i in [0, n). Safe only for bodies with disjoint writes;
// reductions must go through per-chunk buffers summed in chunk order by the
// caller so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw <= 1 || n < 1024) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t n_chunks = std::min<std::size_t>(n, static_cast<std::size_t>(hw) * 4);
  std::size_t chunk = (n + n_chunks - 1) / n_chunks;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      std::size_t lo = c * chunk;
      std::size_t hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < hw; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace esdf
