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

#include <cmath>
#include <random>

#include "rsbench/error.hpp"
#include "rsbench/graph.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace rsbench {
namespace {

using testing::DenseWalk;

using testing::Dense;

CsrMatrix TwoByTwo() {
  const std::vector<Triplet> t = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}};
  return BuildMatrix(t, 2, 2);
}

WalkConfig Unlimited(double alpha, double beta) {
  WalkConfig cfg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.topk = kUnlimited;
  return cfg;
}

TEST(WalkProduct, HandExample) {
  const Dense w = testing::ToDense(WalkProduct(TwoByTwo(), 1.0));
  EXPECT_DOUBLE_EQ(w[0][0], 0.75);
  EXPECT_DOUBLE_EQ(w[0][1], 0.25);
  EXPECT_DOUBLE_EQ(w[1][0], 0.5);
  EXPECT_DOUBLE_EQ(w[1][1], 0.5);
  const SparseWeights p3 = FitP3Alpha(TwoByTwo(), Unlimited(1.0, 0.0));
  EXPECT_EQ(p3.Get(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(p3.Get(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(p3.Get(1, 0), 0.5);
}

TEST(WalkProduct, AlphaZeroCountsCoWalks) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    const CsrMatrix x = testing::RandomMatrix(gen, 12, 9, 0.4);
    const Dense xd = testing::ToDense(x);
    const Dense counts = testing::MatMul(testing::TransposeDense(xd), xd);
    EXPECT_EQ(testing::ToDense(WalkProduct(x, 0.0)), counts);
  }
}

TEST(WalkProduct, MatchesDenseBruteForce) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Index users = static_cast<Index>(gen() % 20 + 1);
    const Index items = static_cast<Index>(gen() % 20 + 1);
    const CsrMatrix x = testing::RandomMatrix(gen, users, items, 0.1 + 0.4 * (trial % 5) / 4.0);
    const double alpha = (trial % 7) * 0.25;
    const Dense expect = DenseWalk(x, alpha);
    const Dense got = testing::ToDense(WalkProduct(x, alpha));
    for (Index i = 0; i < items; ++i)
      for (Index j = 0; j < items; ++j) EXPECT_NEAR(got[i][j], expect[i][j], 1e-12);
  }
}

TEST(WalkProduct, AlphaOneRowsAreStochastic) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const CsrMatrix x = testing::RandomMatrix(gen, 30, 25, 0.15);
    const CsrMatrix w = WalkProduct(x, 1.0);
    for (Index i = 0; i < w.rows(); ++i) {
      if (w.RowSize(i) == 0) continue;
      double s = 0;
      for (double v : w.RowValues(i)) s += v;
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(FitP3Alpha, SingleCell) {
  const std::vector<Triplet> t = {{0, 0, 1}};
  const SparseWeights w = FitP3Alpha(BuildMatrix(t, 1, 1));
  EXPECT_EQ(w.size(), 1);
  EXPECT_EQ(w.nnz(), 0u);
  EXPECT_THROW(FitP3Alpha(CsrMatrix(2, 2)), InvalidArgument);
}

TEST(FitRp3Beta, HandExample) {
  const SparseWeights w = FitRp3Beta(TwoByTwo(), Unlimited(1.0, 0.4));
  EXPECT_NEAR(w.Get(0, 1), 0.25, 1e-12);
  EXPECT_NEAR(w.Get(1, 0), 0.5 / std::pow(2.0, 0.4), 1e-12);
  EXPECT_NEAR(w.Get(1, 0), 0.3789, 1e-4);
  EXPECT_EQ(w.Get(0, 0), 0.0);
}

TEST(FitRp3Beta, BetaZeroEqualsP3Alpha) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const CsrMatrix x = testing::RandomMatrix(gen, 25, 20, 0.2);
    if (x.nnz() == 0) continue;
    WalkConfig cfg;
    cfg.alpha = 0.3 + 0.1 * (trial % 8);
    cfg.beta = 0.0;
    cfg.topk = trial % 2 ? 5 : kUnlimited;
    const Dense a = testing::ToDense(FitRp3Beta(x, cfg).matrix());
    const Dense b = testing::ToDense(FitP3Alpha(x, cfg).matrix());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[i][j], b[i][j], 1e-12);
  }
}

TEST(FitRp3Beta, OutputInvariants) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const CsrMatrix x = testing::RandomMatrix(gen, 40, 30, 0.2);
    WalkConfig cfg;
    cfg.topk = gen() % 10 + 1;
    for (const SparseWeights& w : {FitRp3Beta(x, cfg), FitP3Alpha(x, cfg)}) {
      for (Index i = 0; i < w.size(); ++i) {
        EXPECT_LE(static_cast<std::size_t>(w.matrix().RowSize(i)), cfg.topk);
        EXPECT_EQ(w.Get(i, i), 0.0);
        for (double v : w.matrix().RowValues(i)) EXPECT_GE(v, 0.0);
      }
    }
  }
}

TEST(FitRp3Beta, TopOneKeepsRowMaximum) {
  std::mt19937_64 gen(6);
  const CsrMatrix x = testing::RandomMatrix(gen, 30, 15, 0.3);
  WalkConfig cfg;
  cfg.topk = 1;
  const SparseWeights one = FitRp3Beta(x, cfg);
  cfg.topk = kUnlimited;
  const SparseWeights all = FitRp3Beta(x, cfg);
  for (Index i = 0; i < one.size(); ++i) {
    double best = 0;
    Index arg = -1;
    for (Index j = 0; j < all.size(); ++j) {
      if (all.Get(i, j) > best) {
        best = all.Get(i, j);
        arg = j;
      }
    }
    if (arg < 0) {
      EXPECT_EQ(one.matrix().RowSize(i), 0);
      continue;
    }
    ASSERT_EQ(one.matrix().RowSize(i), 1);
    EXPECT_EQ(one.matrix().RowIndices(i)[0], arg);
  }
}

TEST(FitTopPopular, Examples) {
  EXPECT_EQ(FitTopPopular(CsrMatrix(3, 4)).order, (std::vector<Index>{0, 1, 2, 3}));
  std::vector<Triplet> t;
  const int pops[] = {2, 5, 1};
  for (Index i = 0; i < 3; ++i)
    for (Index u = 0; u < pops[i]; ++u) t.push_back({u, i, 1});
  EXPECT_EQ(FitTopPopular(BuildMatrix(t, 5, 3)).order, (std::vector<Index>{1, 0, 2}));
  const std::vector<Triplet> tie = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
  EXPECT_EQ(FitTopPopular(BuildMatrix(tie, 2, 2)).order, (std::vector<Index>{0, 1}));
}

}  // namespace
}  // namespace rsbench
