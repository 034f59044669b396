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

#include <gtest/gtest.h>

#include <random>

#include "rsbench/bench.hpp"
#include "rsbench/error.hpp"
#include "test_util.hpp"

namespace rsbench {
namespace {

ModelSpec FastSpec(ModelKind kind) {
  ModelSpec spec = ModelSpec::Defaults(kind);
  spec.als.factors = 4;
  spec.als.iterations = 3;
  spec.sgd.factors = 4;
  spec.sgd.epochs = 3;
  return spec;
}

TEST(MeasureTraining, PositiveAndRepeatable) {
  std::mt19937_64 gen(1);
  const CsrMatrix x = testing::RandomMatrix(gen, 60, 40, 0.15);
  for (ModelKind kind : kAllModelKinds) {
    FittedModel fitted = FitModel(FastSpec(ModelKind::kTopPop), x);
    const BenchRecord r = MeasureTraining(FastSpec(kind), x, 3, &fitted);
    EXPECT_GT(r.fit_seconds, 0.0) << ModelName(kind);
    EXPECT_GT(r.peak_bytes, 0u);
    EXPECT_EQ(r.repetitions, 3u);
    EXPECT_EQ(r.dataset_size, x.nnz());
    EXPECT_FALSE(r.skipped);
    EXPECT_TRUE(fitted == FitModel(FastSpec(kind), x)) << ModelName(kind);
  }
  EXPECT_GT(CurrentRssBytes(), 0u);
}

TEST(MemoryMonitor, SamplesWithoutDisturbingResults) {
  std::mt19937_64 gen(2);
  const auto d = testing::RandomDataset(gen, 40, 30, 0.3);
  const EvalSplit split = HoldoutSplit(d, 0.8, 3);
  const std::vector<std::size_t> ks = {5, 10};
  const FittedModel model = FitModel(FastSpec(ModelKind::kEaseR), split.train);
  const MetricsReport before = EvaluateModel(model, split, ks);
  MetricsReport during;
  {
    MemoryMonitor monitor(std::chrono::milliseconds(1));
    during = EvaluateModel(FitModel(FastSpec(ModelKind::kEaseR), split.train), split, ks);
    monitor.Stop();
    EXPECT_GE(monitor.samples(), 1u);
    EXPECT_GT(monitor.peak_bytes(), 0u);
  }
  EXPECT_EQ(before.values, during.values);
}

TEST(LatencyBatch, DeterministicAndReplacementFlag) {
  bool replace = true;
  const auto a = LatencyBatch(100, 20, 5, &replace);
  EXPECT_FALSE(replace);
  EXPECT_EQ(a, LatencyBatch(100, 20, 5));
  EXPECT_EQ(a.size(), 20u);
  std::vector<Index> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  const auto b = LatencyBatch(5, 20, 5, &replace);
  EXPECT_TRUE(replace);
  EXPECT_EQ(b.size(), 20u);
}

TEST(MeasureLatency, SingleUserBatch) {
  std::mt19937_64 gen(3);
  const CsrMatrix x = testing::RandomMatrix(gen, 30, 20, 0.2);
  const FittedModel model = FitModel(FastSpec(ModelKind::kRp3Beta), x);
  const BenchRecord r = MeasureLatency(model, x, 1, 10, 0);
  EXPECT_EQ(r.batch, 1u);
  EXPECT_DOUBLE_EQ(r.latency_mean_ms, r.latency_total_ms);
  EXPECT_DOUBLE_EQ(r.latency_ms_per_1k, r.latency_mean_ms * 1000);
  EXPECT_GE(r.latency_total_ms, 0.0);
  const BenchRecord big = MeasureLatency(model, x, 100, 10, 0);
  EXPECT_TRUE(big.sampled_with_replacement);
  EXPECT_FALSE(big.note.empty());
}

TEST(ScalabilitySweep, OversizedRequestsAreSkipped) {
  std::mt19937_64 gen(4);
  const auto d = testing::RandomDataset(gen, 60, 40, 0.3);
  const std::vector<ModelSpec> specs = {FastSpec(ModelKind::kTopPop),
                                        FastSpec(ModelKind::kRp3Beta)};
  const std::vector<std::size_t> sizes = {200, d.interactions.size() + 1};
  PreprocessConfig pre;
  pre.min_interactions = 1;
  pre.binarize_threshold = 1;
  const auto records = ScalabilitySweep(specs, d, sizes, 1, pre, 1);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_FALSE(records[0].skipped);
  EXPECT_FALSE(records[1].skipped);
  EXPECT_TRUE(records[2].skipped);
  EXPECT_FALSE(records[2].note.empty());
  for (const auto& r : records) {
    EXPECT_GE(r.fit_seconds, 0.0);
    const BenchRecord back = BenchRecordFromJson(BenchRecordToJson(r));
    EXPECT_EQ(BenchRecordToJson(back), BenchRecordToJson(r));
  }
  const std::string csv = BenchRecordsToCsv(records);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  const std::vector<std::size_t> descending = {10, 5};
  EXPECT_THROW(ScalabilitySweep(specs, d, descending, 1, pre, 1), InvalidArgument);
}

TEST(Capabilities, MatchModelBehaviour) {
  std::mt19937_64 gen(5);
  const CsrMatrix x = testing::RandomMatrix(gen, 20, 15, 0.3);
  const std::vector<Index> history = {0, 3};
  for (ModelKind kind : kAllModelKinds) {
    const Capabilities c = CapabilitiesOf(kind);
    const FittedModel model = FitModel(FastSpec(kind), x);
    const bool can = c.supports_user_fold_in || c.supports_new_user_scoring_without_refit;
    if (can) {
      EXPECT_NO_THROW(model.RecommendFromHistory(history, 3)) << ModelName(kind);
    } else {
      EXPECT_THROW(model.RecommendFromHistory(history, 3), InvalidArgument) << ModelName(kind);
    }
    EXPECT_EQ(c.supports_user_fold_in, kind == ModelKind::kAls);
    EXPECT_TRUE(c.requires_full_refit_for_new_items);
  }
}

TEST(ColdStart, ProfilesAreTruncated) {
  std::mt19937_64 gen(6);
  const auto d = testing::RandomDataset(gen, 80, 40, 0.3);
  const CsrMatrix full = ToMatrix(Binarize(d, 0.0));
  const EvalSplit split = ColdStartSplit(d, 2, 7);
  EXPECT_EQ(split, ColdStartSplit(d, 2, 7));
  std::size_t cold = 0;
  for (Index u = 0; u < split.n_users(); ++u) {
    if (split.test_relevant[u].empty()) {
      EXPECT_EQ(split.train.RowIndices(u).size(), full.RowIndices(u).size());
      continue;
    }
    ++cold;
    EXPECT_LE(split.train.RowIndices(u).size(), 2u);
  }
  EXPECT_GT(cold, 0u);

  // With a cap above every profile, held-out users get the ordinary 80/20 cut.
  const EvalSplit wide = ColdStartSplit(d, 1000, 7);
  for (Index u = 0; u < wide.n_users(); ++u) {
    if (wide.test_relevant[u].empty()) continue;
    EXPECT_EQ(wide.train.RowIndices(u).size(), TrainCount(full.RowIndices(u).size(), 0.8));
  }
}

TEST(ColdStart, TopPopularIgnoresProfiles) {
  std::mt19937_64 gen(7);
  const auto d = testing::RandomDataset(gen, 80, 40, 0.3);
  const EvalSplit split = ColdStartSplit(d, 1, 3);
  const FittedModel model = FitModel(FastSpec(ModelKind::kTopPop), split.train);
  const auto reference = model.Recommend(split.train, 0, 10, false);
  for (Index u = 1; u < split.n_users(); ++u) {
    EXPECT_EQ(model.Recommend(split.train, u, 10, false), reference);
  }
  const MetricsReport r = ColdStartEval(FastSpec(ModelKind::kTopPop), d, 1, 3);
  EXPECT_GT(r.evaluated_users, 0u);
}

TEST(Incremental, FunkSvdUnsupportedAlsReported) {
  std::mt19937_64 gen(8);
  const auto d = testing::RandomDataset(gen, 100, 40, 0.25);
  const auto funk = IncrementalUpdateEval(FastSpec(ModelKind::kFunkSvd), d, 0.1, 1);
  EXPECT_FALSE(funk.supported);
  EXPECT_FALSE(funk.note.empty());
  EXPECT_TRUE(funk.incorporation.skipped);

  const auto als = IncrementalUpdateEval(FastSpec(ModelKind::kAls), d, 0.1, 1);
  EXPECT_TRUE(als.supported);
  EXPECT_FALSE(als.incremental.values.empty());
  EXPECT_FALSE(als.retrained.values.empty());
  EXPECT_FALSE(als.delta.empty());
  for (const auto& [key, v] : als.delta) {
    const auto at = key.find('@');
    ASSERT_NE(at, std::string::npos);
    const std::string metric = key.substr(0, at);
    const std::size_t k = std::stoul(key.substr(at + 1));
    EXPECT_NEAR(v, als.retrained.values.at(metric).at(k) - als.incremental.values.at(metric).at(k),
                1e-12);
  }
  EXPECT_GE(als.incorporation.fit_seconds, 0.0);
  EXPECT_GT(als.retrain.fit_seconds, 0.0);
  EXPECT_THROW(IncrementalUpdateEval(FastSpec(ModelKind::kAls), d, 0.0, 1), InvalidArgument);
}

}  // namespace
}  // namespace rsbench
