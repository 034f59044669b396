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

#include "rsbench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <unistd.h>

#include "rsbench/error.hpp"
#include "rsbench/random.hpp"

namespace rsbench {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<std::size_t> KsOrDefault(std::span<const std::size_t> ks) {
  if (ks.empty()) return {10};
  return {ks.begin(), ks.end()};
}

std::string FormatDouble(double v) {
  std::ostringstream s;
  s.precision(9);
  s << v;
  return s.str();
}

// Seeded subset of ceil(fraction * n) indices (at least one), sorted.
std::vector<Index> SampleUsers(Index n_users, double fraction, std::uint64_t seed) {
  std::vector<Index> users(static_cast<std::size_t>(n_users));
  std::iota(users.begin(), users.end(), 0);
  Rng rng(seed);
  rng.Shuffle(std::span<Index>(users));
  const auto want = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n_users)));
  users.resize(std::clamp<std::size_t>(want, 1, users.size()));
  std::sort(users.begin(), users.end());
  return users;
}

std::vector<std::vector<Index>> ItemsPerUser(const Dataset& d) {
  std::vector<std::vector<Index>> per_user(static_cast<std::size_t>(d.n_users()));
  for (const auto& x : d.interactions) per_user[x.user].push_back(x.item);
  for (auto& items : per_user) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  return per_user;
}

CsrMatrix BinaryMatrix(const std::vector<std::vector<Index>>& rows, Index n_items) {
  std::vector<Triplet> t;
  for (std::size_t u = 0; u < rows.size(); ++u) {
    for (Index i : rows[u]) t.push_back({static_cast<Index>(u), i, 1.0});
  }
  return BuildMatrix(t, static_cast<Index>(rows.size()), n_items);
}

}  // namespace

std::uint64_t CurrentRssBytes() {
  std::ifstream statm("/proc/self/statm");
  std::uint64_t size = 0, resident = 0;
  if (!(statm >> size >> resident)) return 0;
  return resident * static_cast<std::uint64_t>(sysconf(_SC_PAGESIZE));
}

MemoryMonitor::MemoryMonitor(std::chrono::milliseconds period) : period_(period) {
  Sample();
  thread_ = std::thread([this] {
    while (running_.load()) {
      std::this_thread::sleep_for(period_);
      Sample();
    }
  });
}

MemoryMonitor::~MemoryMonitor() { Stop(); }

void MemoryMonitor::Stop() {
  if (running_.exchange(false) && thread_.joinable()) thread_.join();
  if (thread_.joinable()) thread_.join();
  Sample();
}

void MemoryMonitor::Sample() {
  const std::uint64_t rss = CurrentRssBytes();
  std::uint64_t prev = peak_.load();
  while (rss > prev && !peak_.compare_exchange_weak(prev, rss)) {
  }
  samples_.fetch_add(1);
}

BenchRecord MeasureTraining(const ModelSpec& spec, const CsrMatrix& train,
                            std::size_t repetitions, FittedModel* fitted) {
  if (repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
  BenchRecord record;
  record.model = std::string(ModelName(spec.kind));
  record.config = spec.ConfigJson();
  record.dataset_size = train.nnz();
  record.repetitions = repetitions;
  std::vector<double> times;
  MemoryMonitor monitor;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto start = Clock::now();
    FittedModel model = FitModel(spec, train);
    times.push_back(SecondsSince(start));
    if (fitted != nullptr && r + 1 == repetitions) *fitted = std::move(model);
  }
  monitor.Stop();
  record.fit_seconds = Median(times);
  record.peak_bytes = monitor.peak_bytes();
  return record;
}

std::vector<Index> LatencyBatch(Index n_users, std::size_t batch, std::uint64_t seed,
                                bool* with_replacement) {
  if (n_users < 1) throw InvalidArgument("latency batch needs at least one user");
  Rng rng(seed);
  std::vector<Index> users;
  const bool replace = batch > static_cast<std::size_t>(n_users);
  if (replace) {
    users.reserve(batch);
    for (std::size_t n = 0; n < batch; ++n) {
      users.push_back(static_cast<Index>(rng.Below(static_cast<std::uint64_t>(n_users))));
    }
  } else {
    users.resize(static_cast<std::size_t>(n_users));
    std::iota(users.begin(), users.end(), 0);
    for (std::size_t n = 0; n < batch; ++n) {
      const std::size_t j = n + static_cast<std::size_t>(rng.Below(users.size() - n));
      std::swap(users[n], users[j]);
    }
    users.resize(batch);
  }
  if (with_replacement != nullptr) *with_replacement = replace;
  return users;
}

BenchRecord MeasureLatency(const FittedModel& model, const CsrMatrix& train, std::size_t batch,
                           std::size_t k, std::uint64_t seed) {
  if (batch < 1 || k < 1) throw InvalidArgument("batch and k must be >= 1");
  BenchRecord record;
  record.model = std::string(ModelName(model.kind()));
  record.config = model.spec().ConfigJson();
  record.dataset_size = train.nnz();
  record.batch = batch;
  const auto users = LatencyBatch(train.rows(), batch, seed, &record.sampled_with_replacement);
  if (record.sampled_with_replacement) {
    record.note = "batch larger than user count; users sampled with replacement";
  }
  std::size_t sink = 0;
  const auto start = Clock::now();
  for (Index u : users) sink += model.Recommend(train, u, k).size();
  record.latency_total_ms = SecondsSince(start) * 1e3;
  record.latency_mean_ms = record.latency_total_ms / static_cast<double>(users.size());
  record.latency_ms_per_1k = record.latency_mean_ms * 1000.0;
  if (sink == 0 && train.cols() > 0) record.note += (record.note.empty() ? "" : "; ") + std::string("empty lists");
  return record;
}

Dataset Preprocess(const Dataset& d, const PreprocessConfig& cfg) {
  return Binarize(KcoreFilter(d, cfg.min_interactions), cfg.binarize_threshold);
}

std::vector<BenchRecord> ScalabilitySweep(std::span<const ModelSpec> specs, const Dataset& d,
                                          std::span<const std::size_t> sizes,
                                          std::uint64_t seed,
                                          const PreprocessConfig& preprocess,
                                          std::size_t repetitions) {
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    throw InvalidArgument("sweep sizes must be ascending");
  }
  std::vector<BenchRecord> records;
  for (std::size_t size : sizes) {
    if (size > d.interactions.size()) {
      BenchRecord skipped;
      skipped.model = "*";
      skipped.dataset_size = size;
      skipped.skipped = true;
      skipped.note = "size " + std::to_string(size) + " exceeds the " +
                     std::to_string(d.interactions.size()) + " available interactions";
      records.push_back(std::move(skipped));
      continue;
    }
    const Dataset sample = Preprocess(Subsample(d, size, seed), preprocess);
    const CsrMatrix train = ToMatrix(sample);
    for (const auto& spec : specs) {
      BenchRecord record = MeasureTraining(spec, train, repetitions);
      record.note = "sampled " + std::to_string(size) + " interactions";
      records.push_back(std::move(record));
    }
  }
  return records;
}

Capabilities CapabilitiesOf(ModelKind kind) {
  Capabilities c;
  switch (kind) {
    case ModelKind::kAls:
      c.supports_user_fold_in = true;
      break;
    case ModelKind::kFunkSvd:
      break;
    default:
      c.supports_new_user_scoring_without_refit = true;
  }
  return c;
}

EvalSplit ColdStartSplit(const Dataset& d, std::size_t max_profile, std::uint64_t seed) {
  if (max_profile < 1) throw InvalidArgument("max_profile must be >= 1");
  auto per_user = ItemsPerUser(d);
  const auto selected = SampleUsers(d.n_users(), 0.1, seed);
  EvalSplit split;
  split.seed = seed;
  split.test_relevant.resize(per_user.size());
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (Index u : selected) {
    auto& items = per_user[u];
    rng.Shuffle(std::span<Index>(items));
    const std::size_t keep =
        items.size() > max_profile ? max_profile : TrainCount(items.size(), 0.8);
    auto& test = split.test_relevant[u];
    test.assign(items.begin() + static_cast<std::ptrdiff_t>(keep), items.end());
    std::sort(test.begin(), test.end());
    items.resize(keep);
    std::sort(items.begin(), items.end());
  }
  split.train = BinaryMatrix(per_user, d.n_items());
  return split;
}

MetricsReport ColdStartEval(const ModelSpec& spec, const Dataset& d, std::size_t max_profile,
                            std::uint64_t seed, std::span<const std::size_t> ks) {
  const EvalSplit split = ColdStartSplit(d, max_profile, seed);
  const FittedModel model = FitModel(spec, split.train);
  const auto k_list = KsOrDefault(ks);
  return EvaluateModel(model, split, k_list);
}

IncrementalResult IncrementalUpdateEval(const ModelSpec& spec, const Dataset& d,
                                        double holdout_users_fraction, std::uint64_t seed,
                                        std::span<const std::size_t> ks) {
  if (!(holdout_users_fraction > 0.0 && holdout_users_fraction < 1.0)) {
    throw InvalidArgument("holdout_users_fraction must lie in (0, 1)");
  }
  IncrementalResult result;
  const std::string name(ModelName(spec.kind));
  const Capabilities caps = CapabilitiesOf(spec.kind);
  if (!caps.supports_user_fold_in && !caps.supports_new_user_scoring_without_refit) {
    result.note = name + " cannot incorporate new users without a full refit";
    result.incorporation.model = result.retrain.model = name;
    result.incorporation.skipped = result.retrain.skipped = true;
    result.incorporation.note = result.retrain.note = result.note;
    return result;
  }
  result.supported = true;
  const auto k_list = KsOrDefault(ks);
  const std::size_t max_k = *std::max_element(k_list.begin(), k_list.end());

  auto per_user = ItemsPerUser(d);
  const auto held_out = SampleUsers(d.n_users(), holdout_users_fraction, seed);
  std::vector<char> is_held_out(per_user.size(), 0);
  for (Index u : held_out) is_held_out[u] = 1;

  // Held-out users keep 80% of their items as the history to incorporate.
  EvalSplit split;
  split.seed = seed;
  split.test_relevant.resize(per_user.size());
  std::vector<std::vector<Index>> base_rows = per_user;
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (Index u : held_out) {
    auto& items = per_user[u];
    rng.Shuffle(std::span<Index>(items));
    const std::size_t keep = TrainCount(items.size(), 0.8);
    split.test_relevant[u].assign(items.begin() + static_cast<std::ptrdiff_t>(keep), items.end());
    std::sort(split.test_relevant[u].begin(), split.test_relevant[u].end());
    items.resize(keep);
    std::sort(items.begin(), items.end());
    base_rows[u].clear();
  }
  split.train = BinaryMatrix(per_user, d.n_items());
  const CsrMatrix base_train = BinaryMatrix(base_rows, d.n_items());

  const FittedModel base = FitModel(spec, base_train);

  // (a) incorporate held-out users without refitting.
  std::vector<std::vector<Index>> incremental_lists(per_user.size());
  const auto start = Clock::now();
  if (caps.supports_user_fold_in) {
    const LatentModel& latent = *base.latent();
    std::vector<Eigen::VectorXd> folded(per_user.size());
    for (Index u : held_out) folded[u] = FoldInUser(latent, spec.als, per_user[u]);
    result.incorporation.fit_seconds = SecondsSince(start);
    for (Index u : held_out) {
      incremental_lists[u] =
          RankTopK(LatentScores(latent, folded[u]), per_user[u], base.popularity(), max_k);
    }
  } else {
    for (Index u : held_out) incremental_lists[u] = base.RecommendFromHistory(per_user[u], max_k);
    result.incorporation.fit_seconds = SecondsSince(start);
  }
  result.incorporation.model = name;
  result.incorporation.config = spec.ConfigJson();
  result.incorporation.dataset_size = split.train.nnz() - base_train.nnz();
  result.incorporation.note =
      caps.supports_user_fold_in ? "fold-in of held-out users" : "direct scoring of held-out users";

  result.incremental = EvaluateRanker(
      [&](Index u, std::size_t k) {
        auto list = incremental_lists[u];
        list.resize(std::min(k, list.size()));
        return list;
      },
      split, k_list);
  result.incremental.model = name;
  result.incremental.config = spec.ConfigJson();

  // (b) full refit with the held-out histories included.
  FittedModel refit = base;
  result.retrain = MeasureTraining(spec, split.train, 1, &refit);
  result.retrain.note = "full refit including held-out users";
  result.retrained = EvaluateModel(refit, split, k_list);

  // (c) metric deltas.
  for (const auto& [metric, by_k] : result.retrained.values) {
    for (const auto& [k, v] : by_k) {
      result.delta[metric + "@" + std::to_string(k)] = v - result.incremental.values[metric][k];
    }
  }
  return result;
}

std::string BenchRecordsToCsv(std::span<const BenchRecord> records) {
  std::ostringstream csv;
  csv << "model,size,fit_seconds,peak_bytes,latency_ms_per_1k,reps\n";
  for (const auto& r : records) {
    csv << r.model << ',' << r.dataset_size << ',' << FormatDouble(r.fit_seconds) << ','
        << r.peak_bytes << ',' << FormatDouble(r.latency_ms_per_1k) << ',' << r.repetitions
        << '\n';
  }
  return csv.str();
}

nlohmann::json BenchRecordToJson(const BenchRecord& r) {
  return {{"model", r.model},
          {"config", r.config},
          {"size", r.dataset_size},
          {"fit_seconds", r.fit_seconds},
          {"peak_bytes", r.peak_bytes},
          {"latency_ms_per_1k", r.latency_ms_per_1k},
          {"latency_total_ms", r.latency_total_ms},
          {"latency_mean_ms", r.latency_mean_ms},
          {"batch", r.batch},
          {"sampled_with_replacement", r.sampled_with_replacement},
          {"reps", r.repetitions},
          {"skipped", r.skipped},
          {"note", r.note}};
}

BenchRecord BenchRecordFromJson(const nlohmann::json& j) {
  BenchRecord r;
  r.model = j.at("model").get<std::string>();
  r.config = j.value("config", nlohmann::json::object());
  r.dataset_size = j.value("size", std::size_t{0});
  r.fit_seconds = j.value("fit_seconds", 0.0);
  r.peak_bytes = j.value("peak_bytes", std::uint64_t{0});
  r.latency_ms_per_1k = j.value("latency_ms_per_1k", 0.0);
  r.latency_total_ms = j.value("latency_total_ms", 0.0);
  r.latency_mean_ms = j.value("latency_mean_ms", 0.0);
  r.batch = j.value("batch", std::size_t{0});
  r.sampled_with_replacement = j.value("sampled_with_replacement", false);
  r.repetitions = j.value("reps", std::size_t{1});
  r.skipped = j.value("skipped", false);
  r.note = j.value("note", std::string());
  return r;
}

nlohmann::json BenchSummaryJson(std::span<const BenchRecord> records) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : records) {
    if (r.skipped) continue;
    rows.push_back({{"model", r.model},
                    {"size", r.dataset_size},
                    {"training_time_min", r.fit_seconds / 60.0},
                    {"peak_memory_gb", static_cast<double>(r.peak_bytes) / 1e9},
                    {"latency_ms_per_1k", r.latency_ms_per_1k},
                    {"reps", r.repetitions}});
  }
  return {{"columns", {"model", "training_time_min", "peak_memory_gb"}}, {"rows", rows}};
}

}  // namespace rsbench
