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

#include "rsbench/ranking.hpp"

#include <algorithm>

namespace rsbench {

std::vector<Index> RankTopK(std::span<const double> scores, std::span<const Index> seen,
                            const PopularityRanking& popularity, std::size_t k,
                            bool filter_seen) {
  const auto is_seen = [&](Index i) {
    return filter_seen && std::binary_search(seen.begin(), seen.end(), i);
  };
  std::vector<Index> candidates;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto item = static_cast<Index>(i);
    if (scores[i] != 0.0 && !is_seen(item)) candidates.push_back(item);
  }
  const auto better = [&](Index a, Index b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  };
  if (candidates.size() > k) {
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                      candidates.end(), better);
    candidates.resize(k);
    return candidates;
  }
  std::sort(candidates.begin(), candidates.end(), better);
  if (candidates.size() == k) return candidates;

  std::vector<char> taken(scores.size(), 0);
  for (Index i : candidates) taken[i] = 1;
  for (Index i : popularity.order) {
    if (candidates.size() >= k) break;
    if (static_cast<std::size_t>(i) >= taken.size() || taken[i] || is_seen(i)) continue;
    taken[i] = 1;
    candidates.push_back(i);
  }
  return candidates;
}

}  // namespace rsbench
