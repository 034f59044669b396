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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "rsbench/dataset.hpp"
#include "rsbench/error.hpp"
#include "rsbench/metrics.hpp"
#include "rsbench/model.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace rsbench {
namespace {

using testing::Naive;

std::vector<Index> SortedRel(const std::set<Index>& s) { return {s.begin(), s.end()}; }

TEST(Metrics, HandExamples) {
  const std::vector<Index> abc = {0, 1, 2};
  const std::vector<Index> ac = {0, 2};
  const std::vector<Index> acd = {0, 2, 3};
  EXPECT_NEAR(PrecisionAtK(abc, ac, 3), 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(RecallAtK(abc, acd, 3), 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(NdcgAtK(abc, ac, 3), (1 + 1 / std::log2(4.0)) / (1 + 1 / std::log2(3.0)), 1e-9);
  EXPECT_NEAR(NdcgAtK(abc, ac, 3), 0.9197, 1e-4);
  EXPECT_NEAR(AveragePrecisionAtK(abc, ac, 3), 5.0 / 6.0, 1e-9);
}

TEST(Metrics, EdgeCases) {
  const std::vector<Index> abc = {0, 1, 2};
  const std::vector<Index> none;
  const std::vector<Index> other = {7, 8};
  for (auto f : {PrecisionAtK, RecallAtK, NdcgAtK, AveragePrecisionAtK}) {
    EXPECT_EQ(f(abc, none, 3), 0.0);
    EXPECT_EQ(f(abc, other, 3), 0.0);
    EXPECT_THROW(f(abc, other, 0), InvalidArgument);
  }
  const std::vector<Index> all = {0, 1, 2, 3};
  EXPECT_EQ(PrecisionAtK(abc, all, 3), 1.0);
  EXPECT_EQ(NdcgAtK(abc, all, 3), 1.0);
  EXPECT_EQ(AveragePrecisionAtK(abc, all, 3), 1.0);
  const std::vector<Index> sub = {0, 1};
  EXPECT_EQ(RecallAtK(abc, sub, 3), 1.0);
  const std::vector<Index> first = {0};
  EXPECT_EQ(AveragePrecisionAtK(abc, first, 3), 1.0);
}

TEST(Metrics, MatchNaiveReference) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n_items = static_cast<Index>(gen() % 40 + 1);
    std::vector<Index> ranked(static_cast<std::size_t>(n_items));
    std::iota(ranked.begin(), ranked.end(), 0);
    std::shuffle(ranked.begin(), ranked.end(), gen);
    ranked.resize(gen() % ranked.size() + 1);
    std::set<Index> rel;
    const std::size_t n_rel = gen() % (n_items + 1);
    while (rel.size() < n_rel) rel.insert(static_cast<Index>(gen() % n_items));
    const std::size_t k = gen() % 20 + 1;
    const auto r = SortedRel(rel);
    EXPECT_NEAR(PrecisionAtK(ranked, r, k), Naive::Precision(ranked, rel, k), 1e-12);
    EXPECT_NEAR(RecallAtK(ranked, r, k), Naive::Recall(ranked, rel, k), 1e-12);
    EXPECT_NEAR(NdcgAtK(ranked, r, k), Naive::Ndcg(ranked, rel, k), 1e-12);
    EXPECT_NEAR(AveragePrecisionAtK(ranked, r, k), Naive::Ap(ranked, rel, k), 1e-12);
  }
}

TEST(Metrics, Properties) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Index> ranked(30);
    std::iota(ranked.begin(), ranked.end(), 0);
    std::shuffle(ranked.begin(), ranked.end(), gen);
    std::set<Index> rel_set;
    const std::size_t n_rel = gen() % 12 + 1;
    while (rel_set.size() < n_rel) rel_set.insert(static_cast<Index>(gen() % 30));
    const auto rel = SortedRel(rel_set);
    const std::size_t k = gen() % 15 + 1;

    // Permuting below rank k changes nothing.
    auto tail = ranked;
    std::shuffle(tail.begin() + static_cast<std::ptrdiff_t>(k), tail.end(), gen);
    EXPECT_EQ(PrecisionAtK(tail, rel, k), PrecisionAtK(ranked, rel, k));
    EXPECT_EQ(RecallAtK(tail, rel, k), RecallAtK(ranked, rel, k));
    EXPECT_EQ(NdcgAtK(tail, rel, k), NdcgAtK(ranked, rel, k));
    EXPECT_EQ(AveragePrecisionAtK(tail, rel, k), AveragePrecisionAtK(ranked, rel, k));

    std::size_t hits = 0;
    for (std::size_t p = 0; p < k; ++p) hits += rel_set.count(ranked[p]);
    EXPECT_NEAR(PrecisionAtK(ranked, rel, k) * k, hits, 1e-12);
    EXPECT_NEAR(RecallAtK(ranked, rel, k) * rel.size(), hits, 1e-12);

    bool prefix = true;
    for (std::size_t p = 0; p < std::min(rel.size(), k); ++p) prefix &= rel_set.count(ranked[p]) > 0;
    const double ndcg = NdcgAtK(ranked, rel, k);
    const double ap = AveragePrecisionAtK(ranked, rel, k);
    EXPECT_EQ(std::abs(ndcg - 1.0) < 1e-12, prefix);
    EXPECT_EQ(std::abs(ap - 1.0) < 1e-12, prefix);
    EXPECT_LE(ap, 1.0 + 1e-12);
    for (double v : {ndcg, ap, PrecisionAtK(ranked, rel, k), RecallAtK(ranked, rel, k)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-12);
    }
  }
}

EvalSplit RandomSplit(std::mt19937_64& gen, Index users, Index items, double density,
                      std::uint64_t seed) {
  const Dataset d = Binarize(testing::RandomDataset(gen, users, items, density), 1.0);
  return HoldoutSplit(d, 0.8, seed);
}

TEST(EvaluateRanker, PerfectOracle) {
  std::mt19937_64 gen(5);
  const EvalSplit split = RandomSplit(gen, 40, 30, 0.5, 1);
  std::size_t min_test = 1000, max_test = 0;
  for (Index u : split.EvaluatedUsers()) {
    min_test = std::min(min_test, split.test_relevant[u].size());
    max_test = std::max(max_test, split.test_relevant[u].size());
  }
  ASSERT_GE(min_test, 1u);
  const RankFn oracle = [&](Index u, std::size_t k) {
    std::vector<Index> list = split.test_relevant[u];
    list.resize(std::min(k, list.size()));
    return list;
  };
  const std::vector<std::size_t> ks = {1, min_test, max_test};
  const MetricsReport r = EvaluateRanker(oracle, split, ks);
  for (Metric m : {Metric::kPrecision, Metric::kNdcg, Metric::kMap})
    for (std::size_t k : {std::size_t{1}, min_test})
      EXPECT_DOUBLE_EQ(r.Value(m, k), 1.0) << MetricName(m) << "@" << k;
  // Recall reaches 1 only once k covers every user's test set.
  EXPECT_DOUBLE_EQ(r.Value(Metric::kRecall, max_test), 1.0);
  EXPECT_DOUBLE_EQ(r.Value(Metric::kNdcg, max_test), 1.0);
  EXPECT_EQ(r.evaluated_users, split.EvaluatedUsers().size());

  const auto groups = GroupUsersByProfile(split.train, 5);
  for (const auto& g : MapPerGroup(oracle, split, groups, 1)) {
    ASSERT_TRUE(g.has_value());
    EXPECT_DOUBLE_EQ(*g, 1.0);
  }
}

TEST(EvaluateRanker, RandomScoresMatchExpectation) {
  std::mt19937_64 gen(6);
  const EvalSplit split = RandomSplit(gen, 2000, 200, 0.1, 3);
  const RankFn random = [&](Index u, std::size_t k) {
    std::mt19937_64 g(static_cast<std::uint64_t>(u) * 7919 + 1);
    std::vector<Index> unseen;
    const auto seen = split.train.RowIndices(u);
    for (Index i = 0; i < split.n_items(); ++i)
      if (!std::binary_search(seen.begin(), seen.end(), i)) unseen.push_back(i);
    std::shuffle(unseen.begin(), unseen.end(), g);
    unseen.resize(std::min(k, unseen.size()));
    return unseen;
  };
  const std::vector<std::size_t> ks = {10};
  const MetricsReport r = EvaluateRanker(random, split, ks);
  // Per user, the hit count is hypergeometric with mean 10 t / (n - s).
  double mean = 0, var = 0;
  const auto users = split.EvaluatedUsers();
  for (Index u : users) {
    const double n = split.n_items() - split.train.RowSize(u);
    const double t = split.test_relevant[u].size();
    const double p = t / n;
    mean += p;
    var += 10 * p * (1 - p) * (n - 10) / (n - 1) / 100.0;
  }
  mean /= users.size();
  const double se = std::sqrt(var) / users.size();
  EXPECT_NEAR(r.Value(Metric::kPrecision, 10), mean, 3 * se);
}

TEST(EvaluateRanker, SingleUserEqualsThatUser) {
  EvalSplit split;
  const std::vector<Triplet> t = {{0, 0, 1}};
  split.train = BuildMatrix(t, 1, 5);
  split.test_relevant = {{2, 4}};
  const std::vector<Index> list = {2, 1, 4};
  const RankFn rank = [&](Index, std::size_t k) {
    return std::vector<Index>(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k));
  };
  const std::vector<std::size_t> ks = {3};
  const MetricsReport r = EvaluateRanker(rank, split, ks);
  EXPECT_EQ(r.Value(Metric::kPrecision, 3), PrecisionAtK(list, split.test_relevant[0], 3));
  EXPECT_EQ(r.Value(Metric::kNdcg, 3), NdcgAtK(list, split.test_relevant[0], 3));
  EXPECT_EQ(r.Value(Metric::kMap, 3), AveragePrecisionAtK(list, split.test_relevant[0], 3));
  EXPECT_EQ(r.evaluated_users, 1u);
}

TEST(EvaluateModel, DeterministicAndChecksShape) {
  std::mt19937_64 gen(9);
  const EvalSplit split = RandomSplit(gen, 60, 40, 0.3, 2);
  const FittedModel model = FitModel(ModelSpec::Defaults(ModelKind::kRp3Beta), split.train);
  const std::vector<std::size_t> ks = {5, 10};
  const MetricsReport a = EvaluateModel(model, split, ks);
  const MetricsReport b = EvaluateModel(model, split, ks);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.model, "rp3beta");

  EvalSplit other = split;
  other.train = CsrMatrix(split.n_users(), split.n_items() + 1);
  other.test_relevant.assign(split.test_relevant.size(), {});
  EXPECT_THROW(EvaluateModel(model, other, ks), InvalidArgument);

  // One group reproduces MAP@k.
  const auto one = GroupUsersByProfile(split.train, 1);
  const auto g = MapPerGroup(model, split, one, 10);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_NEAR(*g[0], a.Value(Metric::kMap, 10), 1e-12);
}

TEST(AggregateSplits, MeanOfMeans) {
  MetricsReport a, b;
  a.model = b.model = "m";
  a.values["ndcg"][10] = 0.2;
  b.values["ndcg"][10] = 0.4;
  a.splits = {{1, 10, a.values}};
  b.splits = {{2, 30, b.values}};
  a.evaluated_users = 10;
  b.evaluated_users = 30;
  const std::vector<MetricsReport> both = {a, b};
  const MetricsReport m = AggregateSplits(both);
  EXPECT_NEAR(m.Value(Metric::kNdcg, 10), 0.3, 1e-15);
  EXPECT_EQ(m.splits.size(), 2u);
  EXPECT_EQ(m.evaluated_users, 30u);
}

TEST(GroupUsersByProfile, Examples) {
  std::vector<Triplet> t;
  for (Index u = 0; u < 10; ++u)
    for (Index i = 0; i <= u; ++i) t.push_back({9 - u, i, 1});  // user 9-u has u+1 items
  const CsrMatrix train = BuildMatrix(t, 10, 10);
  const auto one = GroupUsersByProfile(train, 1);
  EXPECT_EQ(one.group_of_user, std::vector<std::size_t>(10, 0));
  const auto two = GroupUsersByProfile(train, 2);
  for (Index u = 0; u < 10; ++u) {
    EXPECT_EQ(two.group_of_user[u], train.RowSize(u) <= 5 ? 0u : 1u);
  }
  EXPECT_EQ(two.profile_bounds[0], (std::pair<Index, Index>{1, 5}));
  EXPECT_EQ(two.profile_bounds[1], (std::pair<Index, Index>{6, 10}));

  const std::vector<Triplet> flat = {{0, 0, 1}, {1, 0, 1}, {2, 0, 1}, {3, 0, 1}, {4, 0, 1}};
  const auto ties = GroupUsersByProfile(BuildMatrix(flat, 5, 1), 2);
  EXPECT_EQ(ties.group_of_user, (std::vector<std::size_t>{0, 0, 0, 1, 1}));
}

TEST(GroupUsersByProfile, SizesDifferByAtMostOne) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Index users = static_cast<Index>(gen() % 50 + 1);
    const CsrMatrix m = testing::RandomMatrix(gen, users, 20, 0.3);
    const std::size_t n = gen() % static_cast<std::size_t>(users) + 1;
    const auto g = GroupUsersByProfile(m, n);
    std::vector<std::size_t> sizes(n, 0);
    for (auto x : g.group_of_user) ++sizes[x];
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    EXPECT_LE(*hi - *lo, 1u);
    // Profile sizes never decrease across groups.
    for (std::size_t k = 1; k < n; ++k) EXPECT_LE(g.profile_bounds[k - 1].second, g.profile_bounds[k].first);
  }
}

TEST(MapPerGroup, PopularityFavorsHeavyUsers) {
  // Users with larger profiles draw more of their items from the popular head.
  std::mt19937_64 gen(41);
  std::vector<RawRecord> raw;
  const int n_items = 100;
  std::vector<double> w(n_items);
  for (int i = 0; i < n_items; ++i) w[i] = 1.0 / (1 + i);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  for (int u = 0; u < 300; ++u) {
    const std::size_t n = 5 + u / 6;
    std::set<int> items;
    while (items.size() < n) items.insert(pick(gen));
    for (int i : items) raw.push_back({std::to_string(u), std::to_string(i), 1, 0});
  }
  const Dataset d = RemapIds(raw);
  const EvalSplit split = HoldoutSplit(d, 0.8, 1);
  const FittedModel pop = FitModel(ModelSpec::Defaults(ModelKind::kTopPop), split.train);
  const auto groups = GroupUsersByProfile(split.train, 10);
  const auto map = MapPerGroup(pop, split, groups, 10);
  ASSERT_EQ(map.size(), 10u);
  ASSERT_TRUE(map.front() && map.back());
  EXPECT_LE(*map.front(), *map.back());
}

TEST(ReportJson, RoundTripAndCsv) {
  MetricsReport r;
  r.model = "ease-r";
  r.config = {{"lambda", 0.5}};
  r.values["precision"][10] = 0.25;
  r.splits = {{1, 4, r.values}};
  r.evaluated_users = 4;
  r.group_map = {0.5, std::nullopt};
  r.group_k = 10;
  const MetricsReport back = ReportFromJson(ReportToJson(r));
  EXPECT_EQ(ReportToJson(back), ReportToJson(r));
  const std::vector<MetricsReport> reports = {r};
  const std::string csv = ReportsToCsv(reports);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,seed,metric,k,value");
  EXPECT_NE(csv.find("ease-r,1,precision,10,0.25"), std::string::npos);
  EXPECT_NE(csv.find("ease-r,mean,precision,10,0.25"), std::string::npos);
  EXPECT_THROW(ParseMetric("auc"), InvalidArgument);
}

}  // namespace
}  // namespace rsbench
