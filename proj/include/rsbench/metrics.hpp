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
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsbench/dataset.hpp"
#include "rsbench/model.hpp"
#include "rsbench/sparse.hpp"

namespace rsbench {

// Ranking metrics on one list. `relevant` must be sorted; `ranked` must hold
// at least k items (shorter lists count the missing slots as misses).
double PrecisionAtK(std::span<const Index> ranked, std::span<const Index> relevant,
                    std::size_t k);
double RecallAtK(std::span<const Index> ranked, std::span<const Index> relevant,
                 std::size_t k);
// Binary relevance, discount 1/log2(position + 1), normalized by the ideal
// list with min(|relevant|, k) hits.
double NdcgAtK(std::span<const Index> ranked, std::span<const Index> relevant, std::size_t k);
// Sum of precision at each hit position, divided by min(|relevant|, k).
double AveragePrecisionAtK(std::span<const Index> ranked, std::span<const Index> relevant,
                           std::size_t k);

enum class Metric { kPrecision, kRecall, kNdcg, kMap };
inline constexpr Metric kAllMetrics[] = {Metric::kPrecision, Metric::kRecall, Metric::kNdcg,
                                         Metric::kMap};
std::string MetricName(Metric m);  // "precision", "recall", "ndcg", "map"
Metric ParseMetric(const std::string& name);

// metric name -> k -> value
using MetricTable = std::map<std::string, std::map<std::size_t, double>>;

struct SplitMetrics {
  std::uint64_t seed = 0;
  std::size_t evaluated_users = 0;
  MetricTable values;
};

struct MetricsReport {
  std::string model;
  nlohmann::json config = nlohmann::json::object();
  // Unweighted mean of the per-split means.
  MetricTable values;
  std::vector<SplitMetrics> splits;
  std::size_t evaluated_users = 0;  // largest per-split count
  // Mean AP@group_k per profile-size group; nullopt for empty groups.
  std::vector<std::optional<double>> group_map;
  std::size_t group_k = 0;
  // Filled by the bench harness.
  std::optional<double> fit_seconds;
  std::optional<std::uint64_t> peak_bytes;
  std::optional<double> latency_ms_per_1k;

  double Value(Metric m, std::size_t k) const { return values.at(MetricName(m)).at(k); }
};

// Produces the top-k list for a user of the split.
using RankFn = std::function<std::vector<Index>(Index user, std::size_t k)>;

// Evaluates every user with a nonempty test set at every k, metrics as
// per-user means. Users are scored in parallel; sums run in user order.
MetricsReport EvaluateRanker(const RankFn& rank, const EvalSplit& split,
                             std::span<const std::size_t> ks,
                             std::span<const Metric> metrics = kAllMetrics);
MetricsReport EvaluateModel(const FittedModel& model, const EvalSplit& split,
                            std::span<const std::size_t> ks,
                            std::span<const Metric> metrics = kAllMetrics);

// Means of the per-split means; `splits` of the result lists every input.
MetricsReport AggregateSplits(std::span<const MetricsReport> per_split);

struct GroupAssignment {
  std::vector<std::size_t> group_of_user;
  std::size_t n_groups = 0;
  // Training profile size of the first and last user of each group.
  std::vector<std::pair<Index, Index>> profile_bounds;
};

// Users sorted by ascending training-profile size (ties by index), cut into
// n_groups contiguous blocks whose sizes differ by at most one; the earlier
// blocks take the remainder. Group 0 holds the smallest profiles.
GroupAssignment GroupUsersByProfile(const CsrMatrix& train, std::size_t n_groups = 10);

std::vector<std::optional<double>> MapPerGroup(const RankFn& rank, const EvalSplit& split,
                                               const GroupAssignment& groups, std::size_t k);
std::vector<std::optional<double>> MapPerGroup(const FittedModel& model, const EvalSplit& split,
                                               const GroupAssignment& groups, std::size_t k);

// Structured-text form (JSON) and the flat CSV "model,seed,metric,k,value".
// Per-split rows carry their seed; the cross-split mean uses seed "mean".
nlohmann::json ReportToJson(const MetricsReport& report);
MetricsReport ReportFromJson(const nlohmann::json& j);
std::string ReportsToCsv(std::span<const MetricsReport> reports);

}  // namespace rsbench
