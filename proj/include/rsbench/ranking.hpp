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
#include <span>
#include <vector>

#include "rsbench/sparse.hpp"

namespace rsbench {

// Items by descending training count, ties to the lower index. Every model
// pads short recommendation lists from this order.
struct PopularityRanking {
  std::vector<Index> order;
  std::vector<double> counts;

  bool operator==(const PopularityRanking&) const = default;
};

// Top-k items from a dense score vector. Items with a nonzero score come
// first (descending score, ties to the lower index); the rest of the list is
// filled from `popularity`. `seen` must be sorted; its items are skipped
// entirely when filter_seen is set. Returns fewer than k items only when
// fewer than k items are eligible.
std::vector<Index> RankTopK(std::span<const double> scores, std::span<const Index> seen,
                            const PopularityRanking& popularity, std::size_t k,
                            bool filter_seen = true);

}  // namespace rsbench
