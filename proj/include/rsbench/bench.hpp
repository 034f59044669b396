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

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rsbench/dataset.hpp"
#include "rsbench/metrics.hpp"
#include "rsbench/model.hpp"

namespace rsbench {

struct BenchRecord {
  std::string model;
  nlohmann::json config = nlohmann::json::object();
  std::size_t dataset_size = 0;  // interactions in the fitted matrix
  double fit_seconds = 0.0;      // median over repetitions
  std::uint64_t peak_bytes = 0;  // resident-set high-water during the fits
  double latency_ms_per_1k = 0.0;
  std::size_t repetitions = 1;
  // Latency details.
  double latency_total_ms = 0.0;
  double latency_mean_ms = 0.0;
  std::size_t batch = 0;
  bool sampled_with_replacement = false;
  // Set when the measurement did not run (size above the dataset, model
  // without the needed capability); `note` says why.
  bool skipped = false;
  std::string note;
};

// Current resident-set size of this process, 0 when unavailable.
std::uint64_t CurrentRssBytes();

// Samples the resident-set size on a background thread every `period` from
// construction until Stop() (or destruction). One sample is taken on entry
// and one on Stop().
class MemoryMonitor {
 public:
  explicit MemoryMonitor(std::chrono::milliseconds period = std::chrono::milliseconds(50));
  ~MemoryMonitor();
  MemoryMonitor(const MemoryMonitor&) = delete;
  MemoryMonitor& operator=(const MemoryMonitor&) = delete;

  void Stop();
  std::uint64_t peak_bytes() const { return peak_.load(); }
  std::size_t samples() const { return samples_.load(); }

 private:
  void Sample();

  std::chrono::milliseconds period_;
  std::atomic<bool> running_{true};
  std::atomic<std::uint64_t> peak_{0};
  std::atomic<std::size_t> samples_{0};
  std::thread thread_;
};

// Fits `repetitions` times under a memory monitor. Fit time is the median
// wall clock. The last fitted model is stored in *fitted when given.
BenchRecord MeasureTraining(const ModelSpec& spec, const CsrMatrix& train,
                            std::size_t repetitions = 3, FittedModel* fitted = nullptr);

// Users for a latency batch: a seeded sample without replacement when
// batch <= n_users, with replacement otherwise.
std::vector<Index> LatencyBatch(Index n_users, std::size_t batch, std::uint64_t seed,
                                bool* with_replacement = nullptr);

// Wall time to produce top-k lists for a seeded batch of training users.
BenchRecord MeasureLatency(const FittedModel& model, const CsrMatrix& train,
                           std::size_t batch = 1000, std::size_t k = 10,
                           std::uint64_t seed = 0);

struct PreprocessConfig {
  std::size_t min_interactions = 5;
  double binarize_threshold = 4.0;
};

// parse -> remap -> k-core -> binarize, starting from a remapped dataset.
Dataset Preprocess(const Dataset& d, const PreprocessConfig& cfg = {});

// For each size: subsample, preprocess, fit every spec. Sizes above the
// dataset produce a skipped record. Records are ordered by size, then spec.
std::vector<BenchRecord> ScalabilitySweep(std::span<const ModelSpec> specs, const Dataset& d,
                                          std::span<const std::size_t> sizes,
                                          std::uint64_t seed,
                                          const PreprocessConfig& preprocess = {},
                                          std::size_t repetitions = 3);

struct Capabilities {
  bool supports_user_fold_in = false;
  bool supports_new_user_scoring_without_refit = false;
  bool requires_full_refit_for_new_items = true;
};
Capabilities CapabilitiesOf(ModelKind kind);

// Split used by ColdStartEval: a seeded 10% of users (at least one) keep
// max_profile training interactions and move the rest to test; when a
// selected user has no more than max_profile interactions the usual
// holdout rule applies. Every other user is all-train with an empty test.
EvalSplit ColdStartSplit(const Dataset& d, std::size_t max_profile, std::uint64_t seed);

// Fits on the cold-start split's train and evaluates the selected users.
MetricsReport ColdStartEval(const ModelSpec& spec, const Dataset& d, std::size_t max_profile = 2,
                            std::uint64_t seed = 0,
                            std::span<const std::size_t> ks = std::span<const std::size_t>());

struct IncrementalResult {
  bool supported = false;
  std::string note;
  BenchRecord incorporation;  // fold-in or direct scoring of the held-out users
  BenchRecord retrain;        // full refit including them
  MetricsReport incremental;  // held-out users, base model
  MetricsReport retrained;    // held-out users, refitted model
  // retrained minus incremental, keyed "metric@k".
  std::map<std::string, double> delta;
};

// Holds out a seeded fraction of users (at least one), fits on the rest,
// then scores the held-out users from 80% of their history without a refit,
// and compares against a full refit that includes that history.
IncrementalResult IncrementalUpdateEval(
    const ModelSpec& spec, const Dataset& d, double holdout_users_fraction = 0.05,
    std::uint64_t seed = 0, std::span<const std::size_t> ks = std::span<const std::size_t>());

// "model,size,fit_seconds,peak_bytes,latency_ms_per_1k,reps"
std::string BenchRecordsToCsv(std::span<const BenchRecord> records);
nlohmann::json BenchRecordToJson(const BenchRecord& r);
BenchRecord BenchRecordFromJson(const nlohmann::json& j);
// Per model: training time (minutes), peak memory (GB), size and latency.
nlohmann::json BenchSummaryJson(std::span<const BenchRecord> records);

}  // namespace rsbench
