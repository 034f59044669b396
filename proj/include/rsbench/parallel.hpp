// Copyright 2026 The rsbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace rsbench {

// Worker count: REC_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t WorkerCount();

// Runs body(i) for i in [0, n), splitting the range into contiguous chunks
// across WorkerCount() threads. Callers write results into slots indexed
// by i, so output never depends on the number of workers. The first
// exception thrown by any chunk is rethrown after all workers join.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rsbench
