// Copyright 2026 The TermDialog Authors.
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

#ifndef TERMDIALOG_PARALLEL_H_
#define TERMDIALOG_PARALLEL_H_

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace termdialog {

// Runs fn(i) for i in [0, n) over contiguous chunks on num_threads threads.
// fn must only write to slot i of its outputs. If any call throws, the
// exception from the lowest-numbered chunk is rethrown after all threads join.
template <typename Fn>
void parallel_for(size_t n, int num_threads, Fn&& fn) {
  const size_t threads =
      std::min<size_t>(std::max(num_threads, 1), std::max<size_t>(n, 1));
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const size_t chunk = (n + threads - 1) / threads;
  for (size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      const size_t begin = t * chunk;
      const size_t end = std::min(n, begin + chunk);
      try {
        for (size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace termdialog

#endif  // TERMDIALOG_PARALLEL_H_
