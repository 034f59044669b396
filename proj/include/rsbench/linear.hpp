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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rsbench/ranking.hpp"
#include "rsbench/sparse.hpp"

namespace rsbench {

struct EaseConfig {
  double lambda = 0.5;
  // Dense Gram matrices above this many items are refused.
  Index max_items = 50000;
};

// EASE-R closed form. G = X^T X + lambda I, P = G^-1,
// B_ij = -P_ij / P_jj off the diagonal and B_jj = 0. Entries with
// |B_ij| < 1e-12 are not stored.
SparseWeights FitEase(const CsrMatrix& train, const EaseConfig& cfg = {});

// Dense X^T X.
Eigen::MatrixXd GramMatrix(const CsrMatrix& train);

struct SlimConfig {
  double alpha = 1e-4;
  // 1 is Lasso SLIM, 0.5 the ElasticNet variant.
  double l1_ratio = 1.0;
  int max_iters = 100;
  // Stop once the largest coefficient change over a sweep is below tol.
  double tol = 1e-4;
  bool nonnegative = true;
  Index max_items = 50000;
};

inline SlimConfig SlimElasticNetConfig() {
  SlimConfig cfg;
  cfg.l1_ratio = 0.5;
  return cfg;
}

struct SlimColumnResult {
  Eigen::VectorXd weights;
  int sweeps = 0;
  // Objective after each full sweep; filled only when requested.
  std::vector<double> objective_trace;
};

// Per-target objective
//   1/2 ||x_j - X w||^2 + alpha*l1_ratio*||w||_1 + 1/2*alpha*(1-l1_ratio)*||w||^2
// written in terms of the Gram matrix, assuming w_j = 0.
double SlimObjective(const Eigen::MatrixXd& gram, Index target, const Eigen::VectorXd& w,
                     const SlimConfig& cfg);

// Cyclic coordinate descent for one target item with covariance updates:
// q = G w is maintained so each coordinate costs O(1) plus O(n) when it moves.
SlimColumnResult SolveSlimColumn(const Eigen::MatrixXd& gram, Index target,
                                 const SlimConfig& cfg, bool record_objective = false);

struct SlimFitStats {
  int max_sweeps = 0;
  double mean_sweeps = 0.0;
};

// Column j of the result holds the coefficients solved for target j.
SparseWeights FitSlim(const CsrMatrix& train, const SlimConfig& cfg = {},
                      SlimFitStats* stats = nullptr);

// s = sum over history items h (weighted) of row h of the weights.
std::vector<double> ItemModelScores(const SparseWeights& model, std::span<const Index> history,
                                    std::span<const double> history_weights = {});

std::vector<Index> ScoreItemModel(const SparseWeights& model, const CsrMatrix& train,
                                  const PopularityRanking& popularity, Index user,
                                  std::size_t k, bool filter_seen = true);
// Same, deriving the popularity order from train on every call.
std::vector<Index> ScoreItemModel(const SparseWeights& model, const CsrMatrix& train,
                                  Index user, std::size_t k, bool filter_seen = true);

}  // namespace rsbench
