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
#include <limits>

#include "rsbench/ranking.hpp"
#include "rsbench/sparse.hpp"

namespace rsbench {

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

struct WalkConfig {
  double alpha = 0.6;
  // Popularity penalty exponent. FitP3Alpha ignores it.
  double beta = 0.4;
  std::size_t topk = 100;
};

// Two-step item -> user -> item walk: row-stochastic X^T and X, each entry
// raised to alpha, multiplied. Diagonal kept, no truncation.
CsrMatrix WalkProduct(const CsrMatrix& train, double alpha);

// Walk product with the diagonal removed, truncated to topk per row.
SparseWeights FitP3Alpha(const CsrMatrix& train, const WalkConfig& cfg = {});

// Walk product with column j divided by pop(j)^beta, diagonal removed, then
// truncated to topk per row.
SparseWeights FitRp3Beta(const CsrMatrix& train, const WalkConfig& cfg = {});

PopularityRanking FitTopPopular(const CsrMatrix& train);

}  // namespace rsbench
