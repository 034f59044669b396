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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rsbench {

using Index = std::int32_t;
using Offset = std::int64_t;

struct Triplet {
  Index row = 0;
  Index col = 0;
  double weight = 1.0;
};

// Compressed-sparse-row matrix. An empty value array means every stored
// entry is 1 (binary interaction data).
//
// Invariants, checked by Validate():
//   row_offsets().front() == 0, row_offsets().back() == nnz, non-decreasing;
//   column indices strictly increasing within each row;
//   every column index < cols().
class CsrMatrix {
 public:
  CsrMatrix() : row_offsets_(1, 0) {}
  CsrMatrix(Index rows, Index cols);
  // Takes ownership of prebuilt arrays and validates them.
  CsrMatrix(Index rows, Index cols, std::vector<Offset> row_offsets,
            std::vector<Index> col_indices, std::vector<double> values);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return col_indices_.size(); }
  bool is_binary() const { return values_.empty(); }

  std::span<const Offset> row_offsets() const { return row_offsets_; }
  std::span<const Index> col_indices() const { return col_indices_; }
  // Empty for binary matrices; use ValueAt() for uniform access.
  std::span<const double> values() const { return values_; }

  double ValueAt(std::size_t pos) const {
    return values_.empty() ? 1.0 : values_[pos];
  }

  std::span<const Index> RowIndices(Index row) const {
    return {col_indices_.data() + row_offsets_[row],
            static_cast<std::size_t>(row_offsets_[row + 1] - row_offsets_[row])};
  }
  std::span<const double> RowValues(Index row) const;
  Index RowSize(Index row) const {
    return static_cast<Index>(row_offsets_[row + 1] - row_offsets_[row]);
  }

  // Value at (row, col), 0 when absent. Binary search within the row.
  double Get(Index row, Index col) const;

  // Throws InvalidArgument describing the first violated invariant.
  void Validate() const;

  bool operator==(const CsrMatrix& other) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Offset> row_offsets_;
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

using InteractionMatrix = CsrMatrix;

// Builds a CSR matrix from unordered triplets. Repeated (row, col) pairs keep
// the weight of the last occurrence. When every surviving weight is exactly 1
// the value array is omitted. Throws InvalidArgument naming the first
// out-of-bounds record.
CsrMatrix BuildMatrix(std::span<const Triplet> records, Index rows, Index cols);

CsrMatrix Transpose(const CsrMatrix& m);

struct RowView {
  std::vector<Index> indices;
  std::vector<double> weights;
};

// Copy of one row's indices and weights. Throws InvalidArgument when row is
// out of range.
RowView RowNonzeros(const CsrMatrix& m, Index row);

// Sum of each column's stored values.
std::vector<double> ColumnSums(const CsrMatrix& m);

// Row-stochastic transition matrix of m (each row divided by its sum) with
// every stored entry then raised to `exponent`. Empty rows stay empty.
CsrMatrix RowNormalizedPower(const CsrMatrix& m, double exponent);

// Square item-by-item weights with no stored diagonal entries.
class SparseWeights {
 public:
  SparseWeights() = default;
  // Drops any diagonal entries of m. Throws InvalidArgument unless square.
  explicit SparseWeights(CsrMatrix m);

  const CsrMatrix& matrix() const { return matrix_; }
  Index size() const { return matrix_.rows(); }
  std::size_t nnz() const { return matrix_.nnz(); }
  double Get(Index row, Index col) const { return matrix_.Get(row, col); }

  bool operator==(const SparseWeights& other) const = default;

 private:
  CsrMatrix matrix_;
};

struct ProductOptions {
  // Keep at most this many entries per output row, largest magnitude first,
  // ties to the lower column. nullopt keeps everything.
  std::optional<std::size_t> topk;
  // Remove (i, i) before truncation.
  bool drop_diagonal = false;
  // Multiply output column j by column_scale[j] before truncation. Empty
  // means no scaling; otherwise the size must equal b.cols().
  std::span<const double> column_scale;
};

// Exact row-by-row product a * b followed by the per-row truncation in
// `options`. Rows are computed in parallel; output is identical to the
// sequential computation. Throws InvalidArgument on dimension mismatch.
CsrMatrix SparseTopkProduct(const CsrMatrix& a, const CsrMatrix& b,
                            const ProductOptions& options = {});

// Versioned little-endian binary layout:
//   "RSCM"  magic (4 bytes)
//   u32     format version (1)
//   u64     rows, u64 cols, u64 nnz
//   u8      has_values
//   u64     row_offsets[rows + 1]
//   u32     col_indices[nnz]
//   f64     values[nnz]            (only when has_values)
void WriteMatrix(std::ostream& out, const CsrMatrix& m);
CsrMatrix ReadMatrix(std::istream& in);
void SaveMatrix(const std::string& path, const CsrMatrix& m);
CsrMatrix LoadMatrix(const std::string& path);

}  // namespace rsbench
