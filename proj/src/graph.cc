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

#include "rsbench/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rsbench/error.hpp"

namespace rsbench {

namespace {

void CheckWalkConfig(const CsrMatrix& train, const WalkConfig& cfg) {
  if (train.nnz() == 0) throw InvalidArgument("graph models need a nonempty train matrix");
  if (cfg.alpha < 0.0 || cfg.beta < 0.0 || cfg.topk < 1) {
    throw InvalidArgument("walk config needs alpha >= 0, beta >= 0, topk >= 1");
  }
}

CsrMatrix Walk(const CsrMatrix& train, double alpha, std::span<const double> column_scale,
               std::size_t topk) {
  const CsrMatrix item_to_user = RowNormalizedPower(Transpose(train), alpha);
  const CsrMatrix user_to_item = RowNormalizedPower(train, alpha);
  ProductOptions options;
  options.drop_diagonal = true;
  options.column_scale = column_scale;
  if (topk != kUnlimited) options.topk = topk;
  return SparseTopkProduct(item_to_user, user_to_item, options);
}

}  // namespace

CsrMatrix WalkProduct(const CsrMatrix& train, double alpha) {
  return SparseTopkProduct(RowNormalizedPower(Transpose(train), alpha),
                           RowNormalizedPower(train, alpha));
}

SparseWeights FitP3Alpha(const CsrMatrix& train, const WalkConfig& cfg) {
  CheckWalkConfig(train, cfg);
  return SparseWeights(Walk(train, cfg.alpha, {}, cfg.topk));
}

SparseWeights FitRp3Beta(const CsrMatrix& train, const WalkConfig& cfg) {
  CheckWalkConfig(train, cfg);
  std::vector<double> scale(static_cast<std::size_t>(train.cols()), 0.0);
  const auto indices = train.col_indices();
  std::vector<double> pop(scale.size(), 0.0);
  for (Index c : indices) pop[c] += 1.0;
  for (std::size_t j = 0; j < scale.size(); ++j) {
    scale[j] = pop[j] > 0.0 ? 1.0 / std::pow(pop[j], cfg.beta) : 0.0;
  }
  return SparseWeights(Walk(train, cfg.alpha, scale, cfg.topk));
}

PopularityRanking FitTopPopular(const CsrMatrix& train) {
  PopularityRanking ranking;
  ranking.counts = ColumnSums(train);
  ranking.order.resize(ranking.counts.size());
  std::iota(ranking.order.begin(), ranking.order.end(), 0);
  std::stable_sort(ranking.order.begin(), ranking.order.end(), [&](Index a, Index b) {
    return ranking.counts[a] > ranking.counts[b];
  });
  return ranking;
}

}  // namespace rsbench
