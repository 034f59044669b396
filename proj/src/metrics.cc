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

#include "rsbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rsbench/error.hpp"
#include "rsbench/parallel.hpp"

namespace rsbench {

namespace {

bool IsRelevant(std::span<const Index> relevant, Index item) {
  return std::binary_search(relevant.begin(), relevant.end(), item);
}

std::size_t Hits(std::span<const Index> ranked, std::span<const Index> relevant, std::size_t k) {
  std::size_t hits = 0;
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t p = 0; p < n; ++p) hits += IsRelevant(relevant, ranked[p]) ? 1 : 0;
  return hits;
}

double MetricValue(Metric m, std::span<const Index> ranked, std::span<const Index> relevant,
                   std::size_t k) {
  switch (m) {
    case Metric::kPrecision: return PrecisionAtK(ranked, relevant, k);
    case Metric::kRecall: return RecallAtK(ranked, relevant, k);
    case Metric::kNdcg: return NdcgAtK(ranked, relevant, k);
    case Metric::kMap: return AveragePrecisionAtK(ranked, relevant, k);
  }
  return 0.0;
}

nlohmann::json TableToJson(const MetricTable& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [metric, by_k] : table) {
    for (const auto& [k, v] : by_k) j[metric][std::to_string(k)] = v;
  }
  return j;
}

MetricTable TableFromJson(const nlohmann::json& j) {
  MetricTable table;
  for (const auto& [metric, by_k] : j.items()) {
    for (const auto& [k, v] : by_k.items()) table[metric][std::stoul(k)] = v.get<double>();
  }
  return table;
}

std::string FormatValue(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

double PrecisionAtK(std::span<const Index> ranked, std::span<const Index> relevant,
                    std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  return static_cast<double>(Hits(ranked, relevant, k)) / static_cast<double>(k);
}

double RecallAtK(std::span<const Index> ranked, std::span<const Index> relevant, std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  if (relevant.empty()) return 0.0;
  return static_cast<double>(Hits(ranked, relevant, k)) / static_cast<double>(relevant.size());
}

double NdcgAtK(std::span<const Index> ranked, std::span<const Index> relevant, std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  if (relevant.empty()) return 0.0;
  double dcg = 0.0;
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t p = 0; p < n; ++p) {
    if (IsRelevant(relevant, ranked[p])) dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  }
  double ideal = 0.0;
  const std::size_t n_ideal = std::min(k, relevant.size());
  for (std::size_t p = 0; p < n_ideal; ++p) ideal += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  return dcg / ideal;
}

double AveragePrecisionAtK(std::span<const Index> ranked, std::span<const Index> relevant,
                           std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  if (relevant.empty()) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t p = 0; p < n; ++p) {
    if (IsRelevant(relevant, ranked[p])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(std::min(relevant.size(), k));
}

std::string MetricName(Metric m) {
  switch (m) {
    case Metric::kPrecision: return "precision";
    case Metric::kRecall: return "recall";
    case Metric::kNdcg: return "ndcg";
    case Metric::kMap: return "map";
  }
  return "";
}

Metric ParseMetric(const std::string& name) {
  for (Metric m : kAllMetrics) {
    if (MetricName(m) == name) return m;
  }
  throw InvalidArgument("unknown metric \"" + name + "\" (expected precision, recall, ndcg, map)");
}

MetricsReport EvaluateRanker(const RankFn& rank, const EvalSplit& split,
                             std::span<const std::size_t> ks, std::span<const Metric> metrics) {
  if (ks.empty()) throw InvalidArgument("at least one k is required");
  for (std::size_t k : ks) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
  }
  if (split.test_relevant.size() != static_cast<std::size_t>(split.n_users())) {
    throw InvalidArgument("split test sets do not match the train matrix");
  }
  const std::size_t max_k = *std::max_element(ks.begin(), ks.end());
  const std::vector<Index> users = split.EvaluatedUsers();
  const std::size_t cells = metrics.size() * ks.size();

  // One row of metric values per evaluated user.
  std::vector<double> per_user(users.size() * cells, 0.0);
  ParallelFor(users.size(), [&](std::size_t n) {
    const Index u = users[n];
    const std::vector<Index> ranked = rank(u, max_k);
    const auto& relevant = split.test_relevant[u];
    std::size_t c = 0;
    for (Metric m : metrics) {
      for (std::size_t k : ks) per_user[n * cells + c++] = MetricValue(m, ranked, relevant, k);
    }
  });

  MetricsReport report;
  report.evaluated_users = users.size();
  SplitMetrics split_metrics;
  split_metrics.seed = split.seed;
  split_metrics.evaluated_users = users.size();
  std::size_t c = 0;
  for (Metric m : metrics) {
    for (std::size_t k : ks) {
      double sum = 0.0;
      for (std::size_t n = 0; n < users.size(); ++n) sum += per_user[n * cells + c];
      split_metrics.values[MetricName(m)][k] =
          users.empty() ? 0.0 : sum / static_cast<double>(users.size());
      ++c;
    }
  }
  report.values = split_metrics.values;
  report.splits.push_back(std::move(split_metrics));
  return report;
}

MetricsReport EvaluateModel(const FittedModel& model, const EvalSplit& split,
                            std::span<const std::size_t> ks, std::span<const Metric> metrics) {
  if (model.n_users() != split.n_users() || model.n_items() != split.n_items()) {
    throw InvalidArgument("model was fitted on a " + std::to_string(model.n_users()) + "x" +
                          std::to_string(model.n_items()) + " matrix but the split is " +
                          std::to_string(split.n_users()) + "x" +
                          std::to_string(split.n_items()));
  }
  MetricsReport report = EvaluateRanker(
      [&](Index u, std::size_t k) { return model.Recommend(split.train, u, k, true); }, split, ks,
      metrics);
  report.model = std::string(ModelName(model.kind()));
  report.config = model.spec().ConfigJson();
  return report;
}

MetricsReport AggregateSplits(std::span<const MetricsReport> per_split) {
  if (per_split.empty()) throw InvalidArgument("nothing to aggregate");
  MetricsReport out;
  out.model = per_split.front().model;
  out.config = per_split.front().config;
  for (const auto& r : per_split) {
    out.splits.insert(out.splits.end(), r.splits.begin(), r.splits.end());
  }
  for (const auto& s : out.splits) {
    out.evaluated_users = std::max(out.evaluated_users, s.evaluated_users);
    for (const auto& [metric, by_k] : s.values) {
      for (const auto& [k, v] : by_k) out.values[metric][k] += v;
    }
  }
  for (auto& [metric, by_k] : out.values) {
    for (auto& [k, v] : by_k) v /= static_cast<double>(out.splits.size());
  }
  return out;
}

GroupAssignment GroupUsersByProfile(const CsrMatrix& train, std::size_t n_groups) {
  const auto n_users = static_cast<std::size_t>(train.rows());
  if (n_groups < 1 || n_groups > n_users) {
    throw InvalidArgument("n_groups must lie in [1, n_users]");
  }
  std::vector<Index> order(n_users);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return train.RowSize(a) < train.RowSize(b); });
  GroupAssignment groups;
  groups.n_groups = n_groups;
  groups.group_of_user.assign(n_users, 0);
  const std::size_t base = n_users / n_groups;
  const std::size_t extra = n_users % n_groups;
  std::size_t pos = 0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    for (std::size_t n = 0; n < size; ++n) groups.group_of_user[order[pos + n]] = g;
    groups.profile_bounds.emplace_back(train.RowSize(order[pos]),
                                       train.RowSize(order[pos + size - 1]));
    pos += size;
  }
  return groups;
}

std::vector<std::optional<double>> MapPerGroup(const RankFn& rank, const EvalSplit& split,
                                               const GroupAssignment& groups, std::size_t k) {
  if (groups.group_of_user.size() != static_cast<std::size_t>(split.n_users())) {
    throw InvalidArgument("group assignment does not cover the split's users");
  }
  const std::vector<Index> users = split.EvaluatedUsers();
  std::vector<double> ap(users.size(), 0.0);
  ParallelFor(users.size(), [&](std::size_t n) {
    ap[n] = AveragePrecisionAtK(rank(users[n], k), split.test_relevant[users[n]], k);
  });
  std::vector<double> sum(groups.n_groups, 0.0);
  std::vector<std::size_t> count(groups.n_groups, 0);
  for (std::size_t n = 0; n < users.size(); ++n) {
    const std::size_t g = groups.group_of_user[users[n]];
    sum[g] += ap[n];
    ++count[g];
  }
  std::vector<std::optional<double>> out(groups.n_groups);
  for (std::size_t g = 0; g < groups.n_groups; ++g) {
    if (count[g] > 0) out[g] = sum[g] / static_cast<double>(count[g]);
  }
  return out;
}

std::vector<std::optional<double>> MapPerGroup(const FittedModel& model, const EvalSplit& split,
                                               const GroupAssignment& groups, std::size_t k) {
  return MapPerGroup(
      [&](Index u, std::size_t kk) { return model.Recommend(split.train, u, kk, true); }, split,
      groups, k);
}

nlohmann::json ReportToJson(const MetricsReport& report) {
  nlohmann::json j;
  j["model"] = report.model;
  j["config"] = report.config;
  j["evaluated_users"] = report.evaluated_users;
  j["values"] = TableToJson(report.values);
  j["splits"] = nlohmann::json::array();
  for (const auto& s : report.splits) {
    j["splits"].push_back({{"seed", s.seed},
                           {"evaluated_users", s.evaluated_users},
                           {"values", TableToJson(s.values)}});
  }
  if (!report.group_map.empty()) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : report.group_map) groups.push_back(g ? nlohmann::json(*g) : nlohmann::json());
    j["group_map"] = {{"k", report.group_k}, {"values", groups}};
  }
  if (report.fit_seconds) j["fit_seconds"] = *report.fit_seconds;
  if (report.peak_bytes) j["peak_bytes"] = *report.peak_bytes;
  if (report.latency_ms_per_1k) j["latency_ms_per_1k"] = *report.latency_ms_per_1k;
  return j;
}

MetricsReport ReportFromJson(const nlohmann::json& j) {
  MetricsReport r;
  r.model = j.at("model").get<std::string>();
  r.config = j.value("config", nlohmann::json::object());
  r.evaluated_users = j.value("evaluated_users", std::size_t{0});
  r.values = TableFromJson(j.at("values"));
  for (const auto& s : j.value("splits", nlohmann::json::array())) {
    r.splits.push_back({s.at("seed").get<std::uint64_t>(),
                        s.at("evaluated_users").get<std::size_t>(),
                        TableFromJson(s.at("values"))});
  }
  if (j.contains("group_map")) {
    r.group_k = j["group_map"].at("k").get<std::size_t>();
    for (const auto& g : j["group_map"].at("values")) {
      r.group_map.push_back(g.is_null() ? std::nullopt : std::optional<double>(g.get<double>()));
    }
  }
  if (j.contains("fit_seconds")) r.fit_seconds = j["fit_seconds"].get<double>();
  if (j.contains("peak_bytes")) r.peak_bytes = j["peak_bytes"].get<std::uint64_t>();
  if (j.contains("latency_ms_per_1k")) r.latency_ms_per_1k = j["latency_ms_per_1k"].get<double>();
  return r;
}

std::string ReportsToCsv(std::span<const MetricsReport> reports) {
  std::ostringstream csv;
  csv << "model,seed,metric,k,value\n";
  for (const auto& r : reports) {
    for (const auto& s : r.splits) {
      for (const auto& [metric, by_k] : s.values) {
        for (const auto& [k, v] : by_k) {
          csv << r.model << ',' << s.seed << ',' << metric << ',' << k << ',' << FormatValue(v)
              << '\n';
        }
      }
    }
    for (const auto& [metric, by_k] : r.values) {
      for (const auto& [k, v] : by_k) {
        csv << r.model << ",mean," << metric << ',' << k << ',' << FormatValue(v) << '\n';
      }
    }
  }
  return csv.str();
}

}  // namespace rsbench
