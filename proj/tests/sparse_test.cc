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
#include <sstream>

#include "rsbench/error.hpp"
#include "rsbench/sparse.hpp"
#include "test_util.hpp"

namespace rsbench {
namespace {

using testing::Dense;
using testing::ToDense;

TEST(BuildMatrix, EmptyRecords) {
  const CsrMatrix m = BuildMatrix({}, 2, 2);
  EXPECT_EQ(m.nnz(), 0u);
  EXPECT_EQ(std::vector<Offset>(m.row_offsets().begin(), m.row_offsets().end()),
            (std::vector<Offset>{0, 0, 0}));
}

TEST(BuildMatrix, HandLayout) {
  const std::vector<Triplet> t = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}};
  const CsrMatrix m = BuildMatrix(t, 2, 2);
  EXPECT_EQ(m.nnz(), 3u);
  EXPECT_EQ(std::vector<Offset>(m.row_offsets().begin(), m.row_offsets().end()),
            (std::vector<Offset>{0, 2, 3}));
  EXPECT_EQ(std::vector<Index>(m.col_indices().begin(), m.col_indices().end()),
            (std::vector<Index>{0, 1, 0}));
  EXPECT_TRUE(m.is_binary());
}

TEST(BuildMatrix, DuplicateLastWriteWins) {
  const std::vector<Triplet> t = {{0, 1, 1}, {0, 1, 2}};
  const CsrMatrix m = BuildMatrix(t, 2, 2);
  ASSERT_EQ(m.nnz(), 1u);
  EXPECT_DOUBLE_EQ(m.Get(0, 1), 2.0);
  const RowView row = RowNonzeros(m, 0);
  EXPECT_EQ(row.indices, std::vector<Index>{1});
  EXPECT_EQ(row.weights, std::vector<double>{2.0});
}

TEST(BuildMatrix, RejectsOutOfRange) {
  const std::vector<Triplet> t = {{0, 0, 1}, {2, 0, 1}};
  try {
    BuildMatrix(t, 2, 2);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos) << e.what();
  }
  const std::vector<Triplet> bad = {{0, 0, std::nan("")}};
  EXPECT_THROW(BuildMatrix(bad, 1, 1), InvalidArgument);
}

TEST(BuildMatrix, RandomRecordsSatisfyInvariants) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index rows = static_cast<Index>(gen() % 12 + 1);
    const Index cols = static_cast<Index>(gen() % 12 + 1);
    auto t = testing::RandomTriplets(gen, rows, cols, 0.4, trial % 2 == 0);
    // Add duplicates so the dedup path runs.
    for (std::size_t i = 0; i < t.size() / 3; ++i) t.push_back({t[i].row, t[i].col, 3.0});
    const CsrMatrix m = BuildMatrix(t, rows, cols);
    EXPECT_NO_THROW(m.Validate());
    const auto offsets = m.row_offsets();
    ASSERT_EQ(offsets.size(), static_cast<std::size_t>(rows) + 1);
    EXPECT_EQ(offsets.front(), 0);
    EXPECT_EQ(static_cast<std::size_t>(offsets.back()), m.nnz());
    for (Index r = 0; r < rows; ++r) {
      const auto idx = m.RowIndices(r);
      for (std::size_t p = 1; p < idx.size(); ++p) EXPECT_LT(idx[p - 1], idx[p]);
      for (Index c : idx) EXPECT_TRUE(c >= 0 && c < cols);
    }
    // Last write wins against a dense replay.
    Dense expect = testing::Zeros(rows, cols);
    for (const auto& x : t) expect[x.row][x.col] = x.weight;
    EXPECT_EQ(ToDense(m), expect);
  }
}

TEST(Transpose, Examples) {
  const CsrMatrix empty(2, 3);
  const CsrMatrix te = Transpose(empty);
  EXPECT_EQ(te.rows(), 3);
  EXPECT_EQ(te.cols(), 2);
  EXPECT_EQ(te.nnz(), 0u);

  const std::vector<Triplet> eye = {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}};
  const CsrMatrix id = BuildMatrix(eye, 3, 3);
  EXPECT_EQ(Transpose(id), id);

  const std::vector<Triplet> one = {{0, 1, 1}};
  const CsrMatrix t = Transpose(BuildMatrix(one, 2, 2));
  ASSERT_EQ(t.nnz(), 1u);
  EXPECT_EQ(t.Get(1, 0), 1.0);
}

TEST(Transpose, InvolutionOnRandomMatrices) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const CsrMatrix m = testing::RandomMatrix(gen, static_cast<Index>(gen() % 15 + 1),
                                              static_cast<Index>(gen() % 15 + 1), 0.3,
                                              trial % 2 == 0);
    const CsrMatrix t = Transpose(m);
    EXPECT_EQ(ToDense(t), testing::TransposeDense(ToDense(m)));
    EXPECT_EQ(Transpose(t), m);
  }
}

TEST(RowNonzeros, Examples) {
  const std::vector<Triplet> t = {{1, 2, 1}, {1, 5, 1}};
  const CsrMatrix m = BuildMatrix(t, 2, 6);
  const RowView empty = RowNonzeros(m, 0);
  EXPECT_TRUE(empty.indices.empty());
  EXPECT_TRUE(empty.weights.empty());
  const RowView row = RowNonzeros(m, 1);
  EXPECT_EQ(row.indices, (std::vector<Index>{2, 5}));
  EXPECT_EQ(row.weights, (std::vector<double>{1, 1}));
  EXPECT_THROW(RowNonzeros(m, 2), InvalidArgument);
}

CsrMatrix HalfMatrix() {
  const std::vector<Triplet> t = {{0, 0, 0.5}, {0, 1, 0.5}, {1, 0, 1.0}};
  return BuildMatrix(t, 2, 2);
}

TEST(SparseTopkProduct, IdentityTimesM) {
  const std::vector<Triplet> eye = {{0, 0, 1}, {1, 1, 1}};
  const CsrMatrix id = BuildMatrix(eye, 2, 2);
  const CsrMatrix m = HalfMatrix();
  EXPECT_EQ(ToDense(SparseTopkProduct(id, m)), ToDense(m));
}

TEST(SparseTopkProduct, HandProduct) {
  const CsrMatrix m = HalfMatrix();
  const Dense p = ToDense(SparseTopkProduct(m, m));
  EXPECT_DOUBLE_EQ(p[0][0], 0.75);
  EXPECT_DOUBLE_EQ(p[0][1], 0.25);
  EXPECT_DOUBLE_EQ(p[1][0], 0.5);
  EXPECT_DOUBLE_EQ(p[1][1], 0.5);
}

TEST(SparseTopkProduct, TopOneWithTie) {
  const CsrMatrix m = HalfMatrix();
  ProductOptions opt;
  opt.topk = 1;
  const CsrMatrix p = SparseTopkProduct(m, m, opt);
  ASSERT_EQ(p.RowSize(0), 1);
  ASSERT_EQ(p.RowSize(1), 1);
  EXPECT_EQ(p.RowIndices(0)[0], 0);
  EXPECT_DOUBLE_EQ(p.Get(0, 0), 0.75);
  EXPECT_EQ(p.RowIndices(1)[0], 0);
  EXPECT_DOUBLE_EQ(p.Get(1, 0), 0.5);
}

TEST(SparseTopkProduct, MatchesDenseBruteForce) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = static_cast<Index>(gen() % 20 + 1);
    const Index k = static_cast<Index>(gen() % 20 + 1);
    const Index m = static_cast<Index>(gen() % 20 + 1);
    const double density = 0.05 + 0.45 * (gen() % 100) / 100.0;
    const CsrMatrix a = testing::RandomMatrix(gen, n, k, density, false);
    const CsrMatrix b = testing::RandomMatrix(gen, k, m, density, false);
    const Dense expect = testing::MatMul(ToDense(a), ToDense(b));
    const Dense got = ToDense(SparseTopkProduct(a, b));
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < m; ++j) EXPECT_NEAR(got[i][j], expect[i][j], 1e-12);
  }
}

TEST(SparseTopkProduct, RowCountBoundedByK) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    const CsrMatrix a = testing::RandomMatrix(gen, 15, 15, 0.4, false);
    ProductOptions opt;
    opt.topk = gen() % 6;
    const CsrMatrix p = SparseTopkProduct(a, a, opt);
    p.Validate();
    const Dense full = testing::MatMul(ToDense(a), ToDense(a));
    for (Index r = 0; r < p.rows(); ++r) {
      EXPECT_LE(static_cast<std::size_t>(p.RowSize(r)), *opt.topk);
      // Every kept value is at least as large as every dropped one.
      double min_kept = INFINITY, max_dropped = 0.0;
      for (Index c = 0; c < p.cols(); ++c) {
        if (p.Get(r, c) != 0.0) {
          EXPECT_NEAR(p.Get(r, c), full[r][c], 1e-12);
          min_kept = std::min(min_kept, std::abs(full[r][c]));
        } else {
          max_dropped = std::max(max_dropped, std::abs(full[r][c]));
        }
      }
      if (p.RowSize(r) > 0) {
        EXPECT_GE(min_kept + 1e-12, max_dropped);
      }
    }
  }
}

TEST(SparseTopkProduct, DiagonalAndScale) {
  const CsrMatrix m = HalfMatrix();
  const std::vector<double> scale = {2.0, 10.0};
  ProductOptions opt;
  opt.drop_diagonal = true;
  opt.column_scale = scale;
  const CsrMatrix p = SparseTopkProduct(m, m, opt);
  EXPECT_EQ(p.Get(0, 0), 0.0);
  EXPECT_EQ(p.Get(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(p.Get(0, 1), 2.5);
  EXPECT_DOUBLE_EQ(p.Get(1, 0), 1.0);
}

TEST(SparseTopkProduct, DimensionMismatchThrows) {
  EXPECT_THROW(SparseTopkProduct(CsrMatrix(2, 3), CsrMatrix(2, 3)), InvalidArgument);
}

TEST(RowNormalizedPower, HandCases) {
  const std::vector<Triplet> t = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}};
  const CsrMatrix x = BuildMatrix(t, 2, 2);
  EXPECT_EQ(ToDense(RowNormalizedPower(x, 1.0)), ToDense(HalfMatrix()));
  const std::vector<Triplet> w = {{0, 0, 4}, {0, 1, 1}};
  const CsrMatrix r = RowNormalizedPower(BuildMatrix(w, 1, 2), 0.5);
  // Normalized to [0.8, 0.2] first, then raised to the exponent.
  EXPECT_NEAR(r.Get(0, 0), std::sqrt(0.8), 1e-15);
  EXPECT_NEAR(r.Get(0, 1), std::sqrt(0.2), 1e-15);
}

TEST(MatrixIo, RoundTripAndErrors) {
  std::mt19937_64 gen(3);
  for (bool binary : {true, false}) {
    const CsrMatrix m = testing::RandomMatrix(gen, 9, 7, 0.3, binary);
    std::stringstream buf;
    WriteMatrix(buf, m);
    EXPECT_EQ(ReadMatrix(buf), m);
  }
  std::stringstream junk("XXXXjunk");
  EXPECT_THROW(ReadMatrix(junk), IoError);
  std::stringstream full;
  WriteMatrix(full, testing::RandomMatrix(gen, 5, 5, 0.5, false));
  std::stringstream cut(full.str().substr(0, full.str().size() - 3));
  EXPECT_THROW(ReadMatrix(cut), IoError);
  EXPECT_THROW(LoadMatrix("/nonexistent/dir/m.rsm"), IoError);
}

TEST(SparseWeights, DropsDiagonal) {
  const std::vector<Triplet> t = {{0, 0, 3}, {0, 1, 1}, {1, 1, 2}};
  const SparseWeights w(BuildMatrix(t, 2, 2));
  EXPECT_EQ(w.nnz(), 1u);
  EXPECT_EQ(w.Get(0, 1), 1.0);
  EXPECT_THROW(SparseWeights(CsrMatrix(2, 3)), InvalidArgument);
}

}  // namespace
}  // namespace rsbench
