// Copyright 2026 The ottopics Authors.
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

#ifndef OTTOPICS_PARALLEL_HPP_
#define OTTOPICS_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace ottopics {

// Worker count: OTTOPICS_THREADS if set to a positive integer, otherwise the
// hardware concurrency. Always at least 1.
std::size_t thread_count();

// Calls fn(i) for every i in [0, n), spread over up to `threads` workers.
// Callers keep results deterministic by writing to slot i only. The first
// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = thread_count());

}  // namespace ottopics

#endif  // OTTOPICS_PARALLEL_HPP_
