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

#include "rsbench/linear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsbench/error.hpp"
#include "rsbench/graph.hpp"
#include "rsbench/parallel.hpp"

namespace rsbench {

namespace {

constexpr double kDropBelow = 1e-12;

void CheckDenseCap(const CsrMatrix& train, Index max_items, const char* model) {
  if (train.cols() > max_items) {
    std::ostringstream msg;
    msg << model << " needs a dense " << train.cols() << "x" << train.cols()
        << " Gram matrix, above the cap of " << max_items
        << " items; subsample the dataset or raise the cap";
    throw InvalidArgument(msg.str());
  }
}

double SoftThreshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

Eigen::MatrixXd GramMatrix(const CsrMatrix& train) {
  const Index n = train.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (Index u = 0; u < train.rows(); ++u) {
    const auto idx = train.RowIndices(u);
    const auto base = static_cast<std::size_t>(train.row_offsets()[u]);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const double va = train.ValueAt(base + a);
      // Lower triangle only (column idx[a], rows idx[b] >= idx[a]).
      for (std::size_t b = a; b < idx.size(); ++b) {
        gram(idx[b], idx[a]) += va * train.ValueAt(base + b);
      }
    }
  }
  return Eigen::MatrixXd(gram.selfadjointView<Eigen::Lower>());
}

SparseWeights FitEase(const CsrMatrix& train, const EaseConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw InvalidArgument("EASE lambda must be > 0");
  if (train.cols() < 1) throw InvalidArgument("EASE needs at least one item");
  CheckDenseCap(train, cfg.max_items, "EASE-R");
  const Index n = train.cols();

  Eigen::MatrixXd gram = GramMatrix(train);
  gram.diagonal().array() += cfg.lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-15) {
    std::ostringstream msg;
    msg << "EASE-R Gram matrix is numerically singular (reciprocal condition estimate "
        << (llt.info() == Eigen::Success ? llt.rcond() : 0.0) << ")";
    throw NumericError(msg.str());
  }
  const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(n, n));

  std::vector<Triplet> entries;
  for (Index j = 0; j < n; ++j) {
    const double pjj = inverse(j, j);
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double b = -inverse(i, j) / pjj;
      if (std::abs(b) >= kDropBelow) entries.push_back({i, j, b});
    }
  }
  return SparseWeights(BuildMatrix(entries, n, n));
}

double SlimObjective(const Eigen::MatrixXd& gram, Index target, const Eigen::VectorXd& w,
                     const SlimConfig& cfg) {
  const double fit =
      0.5 * (gram(target, target) - 2.0 * gram.col(target).dot(w) + w.dot(gram * w));
  return fit + cfg.alpha * cfg.l1_ratio * w.lpNorm<1>() +
         0.5 * cfg.alpha * (1.0 - cfg.l1_ratio) * w.squaredNorm();
}

SlimColumnResult SolveSlimColumn(const Eigen::MatrixXd& gram, Index target,
                                 const SlimConfig& cfg, bool record_objective) {
  const Index n = static_cast<Index>(gram.rows());
  const double l1 = cfg.alpha * cfg.l1_ratio;
  const double l2 = cfg.alpha * (1.0 - cfg.l1_ratio);

  SlimColumnResult result;
  result.weights = Eigen::VectorXd::Zero(n);
  auto& w = result.weights;
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);  // gram * w

  for (int sweep = 0; sweep < cfg.max_iters; ++sweep) {
    double max_change = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (k == target) continue;
      const double gkk = gram(k, k);
      const double denom = gkk + l2;
      if (denom <= 0.0) continue;
      const double rho = gram(k, target) - q(k) + gkk * w(k);
      double updated = SoftThreshold(rho, l1) / denom;
      if (cfg.nonnegative && updated < 0.0) updated = 0.0;
      const double delta = updated - w(k);
      if (delta == 0.0) continue;
      w(k) = updated;
      q.noalias() += delta * gram.col(k);
      max_change = std::max(max_change, std::abs(delta));
    }
    result.sweeps = sweep + 1;
    if (record_objective) result.objective_trace.push_back(SlimObjective(gram, target, w, cfg));
    if (max_change < cfg.tol) break;
  }
  return result;
}

SparseWeights FitSlim(const CsrMatrix& train, const SlimConfig& cfg, SlimFitStats* stats) {
  if (!(cfg.alpha > 0.0)) throw InvalidArgument("SLIM alpha must be > 0");
  if (cfg.l1_ratio < 0.0 || cfg.l1_ratio > 1.0) {
    throw InvalidArgument("SLIM l1_ratio must lie in [0, 1]");
  }
  if (cfg.max_iters < 1 || !(cfg.tol > 0.0)) {
    throw InvalidArgument("SLIM needs max_iters >= 1 and tol > 0");
  }
  CheckDenseCap(train, cfg.max_items, "SLIM");
  const Index n = train.cols();
  const Eigen::MatrixXd gram = GramMatrix(train);

  std::vector<std::vector<Triplet>> columns(static_cast<std::size_t>(n));
  std::vector<int> sweeps(static_cast<std::size_t>(n), 0);
  ParallelFor(static_cast<std::size_t>(n), [&](std::size_t j) {
    const auto target = static_cast<Index>(j);
    // Items nobody interacted with have an all-zero target column.
    if (gram(target, target) == 0.0) return;
    const SlimColumnResult r = SolveSlimColumn(gram, target, cfg);
    sweeps[j] = r.sweeps;
    for (Index k = 0; k < n; ++k) {
      if (std::abs(r.weights(k)) >= kDropBelow) columns[j].push_back({k, target, r.weights(k)});
    }
  });

  std::vector<Triplet> entries;
  for (const auto& c : columns) entries.insert(entries.end(), c.begin(), c.end());
  if (stats != nullptr) {
    stats->max_sweeps = n > 0 ? *std::max_element(sweeps.begin(), sweeps.end()) : 0;
    double total = 0.0;
    for (int s : sweeps) total += s;
    stats->mean_sweeps = n > 0 ? total / n : 0.0;
  }
  return SparseWeights(BuildMatrix(entries, n, n));
}

std::vector<double> ItemModelScores(const SparseWeights& model, std::span<const Index> history,
                                    std::span<const double> history_weights) {
  const CsrMatrix& w = model.matrix();
  std::vector<double> scores(static_cast<std::size_t>(w.cols()), 0.0);
  for (std::size_t h = 0; h < history.size(); ++h) {
    const Index item = history[h];
    if (item < 0 || item >= w.rows()) {
      throw InvalidArgument("history item " + std::to_string(item) + " out of range");
    }
    const double hw = history_weights.empty() ? 1.0 : history_weights[h];
    const auto idx = w.RowIndices(item);
    const auto base = static_cast<std::size_t>(w.row_offsets()[item]);
    for (std::size_t k = 0; k < idx.size(); ++k) scores[idx[k]] += hw * w.ValueAt(base + k);
  }
  return scores;
}

std::vector<Index> ScoreItemModel(const SparseWeights& model, const CsrMatrix& train,
                                  const PopularityRanking& popularity, Index user,
                                  std::size_t k, bool filter_seen) {
  if (user < 0 || user >= train.rows()) {
    throw InvalidArgument("user " + std::to_string(user) + " out of range");
  }
  if (model.size() != train.cols()) {
    throw InvalidArgument("model has " + std::to_string(model.size()) +
                          " items but train has " + std::to_string(train.cols()));
  }
  const auto history = train.RowIndices(user);
  const auto scores = ItemModelScores(model, history, train.RowValues(user));
  return RankTopK(scores, history, popularity, k, filter_seen);
}

std::vector<Index> ScoreItemModel(const SparseWeights& model, const CsrMatrix& train,
                                  Index user, std::size_t k, bool filter_seen) {
  return ScoreItemModel(model, train, FitTopPopular(train), user, k, filter_seen);
}

}  // namespace rsbench
