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

#include "rsbench/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "binary_io.hpp"
#include "rsbench/error.hpp"
#include "rsbench/parallel.hpp"

namespace rsbench {

namespace {

constexpr char kMatrixMagic[5] = "RSCM";
constexpr std::uint32_t kMatrixVersion = 1;

struct Entry {
  Index col;
  double value;
};

// Rows are materialized independently and stitched together afterwards.
CsrMatrix FromRows(Index rows, Index cols,
                   const std::vector<std::vector<Entry>>& row_entries,
                   bool keep_values) {
  std::vector<Offset> offsets(static_cast<std::size_t>(rows) + 1, 0);
  for (Index r = 0; r < rows; ++r) {
    offsets[r + 1] = offsets[r] + static_cast<Offset>(row_entries[r].size());
  }
  std::vector<Index> indices;
  std::vector<double> values;
  indices.reserve(offsets.back());
  if (keep_values) values.reserve(offsets.back());
  for (const auto& row : row_entries) {
    for (const auto& e : row) {
      indices.push_back(e.col);
      if (keep_values) values.push_back(e.value);
    }
  }
  return CsrMatrix(rows, cols, std::move(offsets), std::move(indices),
                   std::move(values));
}

}  // namespace

CsrMatrix::CsrMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), row_offsets_(static_cast<std::size_t>(rows) + 1, 0) {
  if (rows < 0 || cols < 0) throw InvalidArgument("negative matrix dimension");
}

CsrMatrix::CsrMatrix(Index rows, Index cols, std::vector<Offset> row_offsets,
                     std::vector<Index> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  Validate();
}

std::span<const double> CsrMatrix::RowValues(Index row) const {
  if (values_.empty()) return {};
  return {values_.data() + row_offsets_[row],
          static_cast<std::size_t>(row_offsets_[row + 1] - row_offsets_[row])};
}

double CsrMatrix::Get(Index row, Index col) const {
  const auto idx = RowIndices(row);
  const auto it = std::lower_bound(idx.begin(), idx.end(), col);
  if (it == idx.end() || *it != col) return 0.0;
  return ValueAt(static_cast<std::size_t>(row_offsets_[row] + (it - idx.begin())));
}

void CsrMatrix::Validate() const {
  if (rows_ < 0 || cols_ < 0) throw InvalidArgument("negative matrix dimension");
  if (row_offsets_.size() != static_cast<std::size_t>(rows_) + 1) {
    throw InvalidArgument("row_offsets length must be rows + 1");
  }
  if (row_offsets_.front() != 0) throw InvalidArgument("row_offsets[0] must be 0");
  if (row_offsets_.back() != static_cast<Offset>(col_indices_.size())) {
    throw InvalidArgument("row_offsets[rows] must equal nnz");
  }
  if (!values_.empty() && values_.size() != col_indices_.size()) {
    throw InvalidArgument("values length must equal nnz");
  }
  for (Index r = 0; r < rows_; ++r) {
    if (row_offsets_[r + 1] < row_offsets_[r]) {
      throw InvalidArgument("row_offsets decrease at row " + std::to_string(r));
    }
    for (Offset p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      const Index c = col_indices_[p];
      if (c < 0 || c >= cols_) {
        throw InvalidArgument("column index " + std::to_string(c) +
                              " out of range in row " + std::to_string(r));
      }
      if (p > row_offsets_[r] && col_indices_[p - 1] >= c) {
        throw InvalidArgument("columns not strictly increasing in row " +
                              std::to_string(r));
      }
    }
  }
}

CsrMatrix BuildMatrix(std::span<const Triplet> records, Index rows, Index cols) {
  if (rows < 0 || cols < 0) throw InvalidArgument("negative matrix dimension");
  for (std::size_t n = 0; n < records.size(); ++n) {
    const auto& t = records[n];
    const bool in_bounds = t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols;
    if (!in_bounds || !std::isfinite(t.weight)) {
      std::ostringstream msg;
      msg << "record " << n << " (" << t.row << ", " << t.col << ", " << t.weight << ") "
          << (in_bounds ? "has a non-finite weight"
                        : "is outside a " + std::to_string(rows) + "x" + std::to_string(cols) +
                              " matrix");
      throw InvalidArgument(msg.str());
    }
  }
  // Stable sort keeps input order among duplicates, so the last one wins.
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = records[x];
    const auto& b = records[y];
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<Offset> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> indices;
  std::vector<double> values;
  indices.reserve(order.size());
  values.reserve(order.size());
  for (std::size_t n = 0; n < order.size(); ++n) {
    const auto& t = records[order[n]];
    const bool last_of_run =
        n + 1 == order.size() || records[order[n + 1]].row != t.row ||
        records[order[n + 1]].col != t.col;
    if (!last_of_run) continue;
    indices.push_back(t.col);
    values.push_back(t.weight);
    ++offsets[t.row + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  if (std::all_of(values.begin(), values.end(), [](double v) { return v == 1.0; })) {
    values.clear();
  }
  return CsrMatrix(rows, cols, std::move(offsets), std::move(indices),
                   std::move(values));
}

CsrMatrix Transpose(const CsrMatrix& m) {
  const auto offsets = m.row_offsets();
  const auto indices = m.col_indices();
  std::vector<Offset> t_offsets(static_cast<std::size_t>(m.cols()) + 1, 0);
  for (Index c : indices) ++t_offsets[c + 1];
  std::partial_sum(t_offsets.begin(), t_offsets.end(), t_offsets.begin());

  std::vector<Index> t_indices(m.nnz());
  std::vector<double> t_values(m.is_binary() ? 0 : m.nnz());
  std::vector<Offset> cursor(t_offsets.begin(), t_offsets.end() - 1);
  // Visiting rows in order leaves every output row sorted.
  for (Index r = 0; r < m.rows(); ++r) {
    for (Offset p = offsets[r]; p < offsets[r + 1]; ++p) {
      const Offset dst = cursor[indices[p]]++;
      t_indices[dst] = r;
      if (!m.is_binary()) t_values[dst] = m.values()[p];
    }
  }
  return CsrMatrix(m.cols(), m.rows(), std::move(t_offsets), std::move(t_indices),
                   std::move(t_values));
}

RowView RowNonzeros(const CsrMatrix& m, Index row) {
  if (row < 0 || row >= m.rows()) {
    throw InvalidArgument("row " + std::to_string(row) + " out of range [0, " +
                          std::to_string(m.rows()) + ")");
  }
  RowView view;
  const auto idx = m.RowIndices(row);
  view.indices.assign(idx.begin(), idx.end());
  view.weights.reserve(idx.size());
  const auto base = static_cast<std::size_t>(m.row_offsets()[row]);
  for (std::size_t k = 0; k < idx.size(); ++k) view.weights.push_back(m.ValueAt(base + k));
  return view;
}

std::vector<double> ColumnSums(const CsrMatrix& m) {
  std::vector<double> sums(static_cast<std::size_t>(m.cols()), 0.0);
  const auto indices = m.col_indices();
  for (std::size_t p = 0; p < indices.size(); ++p) sums[indices[p]] += m.ValueAt(p);
  return sums;
}

CsrMatrix RowNormalizedPower(const CsrMatrix& m, double exponent) {
  std::vector<double> values(m.nnz());
  const auto offsets = m.row_offsets();
  for (Index r = 0; r < m.rows(); ++r) {
    double total = 0.0;
    for (Offset p = offsets[r]; p < offsets[r + 1]; ++p) total += m.ValueAt(p);
    for (Offset p = offsets[r]; p < offsets[r + 1]; ++p) {
      const double v = total > 0.0 ? m.ValueAt(p) / total : 0.0;
      values[p] = exponent == 1.0 ? v : std::pow(v, exponent);
    }
  }
  return CsrMatrix(m.rows(), m.cols(),
                   std::vector<Offset>(offsets.begin(), offsets.end()),
                   std::vector<Index>(m.col_indices().begin(), m.col_indices().end()),
                   std::move(values));
}

SparseWeights::SparseWeights(CsrMatrix m) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("weights must be square, got " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()));
  }
  bool has_diagonal = false;
  for (Index r = 0; r < m.rows() && !has_diagonal; ++r) {
    const auto idx = m.RowIndices(r);
    has_diagonal = std::binary_search(idx.begin(), idx.end(), r);
  }
  if (!has_diagonal) {
    matrix_ = std::move(m);
    return;
  }
  std::vector<Offset> offsets(static_cast<std::size_t>(m.rows()) + 1, 0);
  std::vector<Index> indices;
  std::vector<double> values;
  for (Index r = 0; r < m.rows(); ++r) {
    const auto base = static_cast<std::size_t>(m.row_offsets()[r]);
    const auto idx = m.RowIndices(r);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] == r) continue;
      indices.push_back(idx[k]);
      values.push_back(m.ValueAt(base + k));
    }
    offsets[r + 1] = static_cast<Offset>(indices.size());
  }
  matrix_ = CsrMatrix(m.rows(), m.cols(), std::move(offsets), std::move(indices),
                      std::move(values));
}

CsrMatrix SparseTopkProduct(const CsrMatrix& a, const CsrMatrix& b,
                            const ProductOptions& options) {
  if (a.cols() != b.rows()) {
    throw InvalidArgument("product dimension mismatch: " + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()) + " * " +
                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  if (!options.column_scale.empty() &&
      options.column_scale.size() != static_cast<std::size_t>(b.cols())) {
    throw InvalidArgument("column_scale length must equal product columns");
  }
  const Index rows = a.rows();
  std::vector<std::vector<Entry>> out(static_cast<std::size_t>(rows));

  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (static_cast<std::size_t>(rows) + kBlock - 1) / kBlock;
  ParallelFor(blocks, [&](std::size_t block) {
    std::vector<double> acc(static_cast<std::size_t>(b.cols()), 0.0);
    std::vector<char> touched(static_cast<std::size_t>(b.cols()), 0);
    std::vector<Index> pattern;
    const Index begin = static_cast<Index>(block * kBlock);
    const Index end = std::min<Index>(rows, static_cast<Index>((block + 1) * kBlock));
    for (Index r = begin; r < end; ++r) {
      pattern.clear();
      const auto a_idx = a.RowIndices(r);
      const auto a_base = static_cast<std::size_t>(a.row_offsets()[r]);
      for (std::size_t ka = 0; ka < a_idx.size(); ++ka) {
        const double av = a.ValueAt(a_base + ka);
        const Index mid = a_idx[ka];
        const auto b_idx = b.RowIndices(mid);
        const auto b_base = static_cast<std::size_t>(b.row_offsets()[mid]);
        for (std::size_t kb = 0; kb < b_idx.size(); ++kb) {
          const Index c = b_idx[kb];
          if (!touched[c]) {
            touched[c] = 1;
            pattern.push_back(c);
          }
          acc[c] += av * b.ValueAt(b_base + kb);
        }
      }
      auto& row = out[r];
      row.reserve(pattern.size());
      for (Index c : pattern) {
        double v = acc[c];
        acc[c] = 0.0;
        touched[c] = 0;
        if (options.drop_diagonal && c == r) continue;
        if (!options.column_scale.empty()) v *= options.column_scale[c];
        if (v != 0.0) row.push_back({c, v});
      }
      if (options.topk && row.size() > *options.topk) {
        const auto keep = static_cast<std::ptrdiff_t>(*options.topk);
        std::nth_element(row.begin(), row.begin() + keep, row.end(),
                         [](const Entry& x, const Entry& y) {
                           const double ax = std::abs(x.value), ay = std::abs(y.value);
                           return ax != ay ? ax > ay : x.col < y.col;
                         });
        row.resize(*options.topk);
      }
      std::sort(row.begin(), row.end(),
                [](const Entry& x, const Entry& y) { return x.col < y.col; });
    }
  });
  return FromRows(rows, b.cols(), out, true);
}

void WriteMatrix(std::ostream& out, const CsrMatrix& m) {
  detail::WriteMagic(out, kMatrixMagic);
  detail::WriteLe<std::uint32_t>(out, kMatrixVersion);
  detail::WriteLe<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  detail::WriteLe<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  detail::WriteLe<std::uint64_t>(out, m.nnz());
  detail::WriteLe<std::uint8_t>(out, m.is_binary() ? 0 : 1);
  for (Offset o : m.row_offsets()) detail::WriteLe<std::uint64_t>(out, static_cast<std::uint64_t>(o));
  for (Index c : m.col_indices()) detail::WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(c));
  for (double v : m.values()) detail::WriteLe<double>(out, v);
  if (!out) throw IoError("failed writing matrix");
}

CsrMatrix ReadMatrix(std::istream& in) {
  detail::ExpectMagic(in, kMatrixMagic);
  const auto version = detail::ReadLe<std::uint32_t>(in);
  if (version != kMatrixVersion) {
    throw IoError("unsupported matrix format version " + std::to_string(version));
  }
  const auto rows = detail::ReadLe<std::uint64_t>(in);
  const auto cols = detail::ReadLe<std::uint64_t>(in);
  const auto nnz = detail::ReadLe<std::uint64_t>(in);
  const auto has_values = detail::ReadLe<std::uint8_t>(in);
  constexpr std::uint64_t kMaxIndex = static_cast<std::uint64_t>(INT32_MAX);
  if (rows > kMaxIndex || cols > kMaxIndex || nnz > (1ull << 40) || has_values > 1) {
    throw IoError("corrupt matrix header");
  }
  std::vector<Offset> offsets(rows + 1);
  for (auto& o : offsets) o = static_cast<Offset>(detail::ReadLe<std::uint64_t>(in));
  std::vector<Index> indices(nnz);
  for (auto& c : indices) c = static_cast<Index>(detail::ReadLe<std::uint32_t>(in));
  std::vector<double> values(has_values ? nnz : 0);
  for (auto& v : values) v = detail::ReadLe<double>(in);
  try {
    return CsrMatrix(static_cast<Index>(rows), static_cast<Index>(cols),
                     std::move(offsets), std::move(indices), std::move(values));
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("corrupt matrix: ") + e.what());
  }
}

void SaveMatrix(const std::string& path, const CsrMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  WriteMatrix(out, m);
}

CsrMatrix LoadMatrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return ReadMatrix(in);
}

}  // namespace rsbench
