// Copyright 2026 The gradrecon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GRADRECON_SRC_PARALLEL_H_
#define GRADRECON_SRC_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gradrecon::internal {

inline std::size_t WorkerCount(std::size_t work_items, std::size_t min_per_worker) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t by_work = std::max<std::size_t>(1, work_items / std::max<std::size_t>(1, min_per_worker));
  return std::min(hw, by_work);
}

// Splits [0, count) into contiguous chunks, calls fn(chunk, begin, end) on
// worker threads and rethrows the first exception by chunk order. Callers
// write into per-chunk slots and merge in chunk order, which keeps results
// independent of scheduling.
template <class Fn>
void ParallelChunks(std::size_t count, std::size_t chunks, Fn&& fn) {
  chunks = std::max<std::size_t>(1, std::min(chunks, std::max<std::size_t>(count, 1)));
  if (chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> workers;
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = count * c / chunks;
    const std::size_t end = count * (c + 1) / chunks;
    workers.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gradrecon::internal

#endif  // GRADRECON_SRC_PARALLEL_H_
