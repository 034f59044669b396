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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rsbench/ranking.hpp"
#include "rsbench/sparse.hpp"

namespace rsbench {

using FactorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct AlsConfig {
  int factors = 50;
  int iterations = 20;
  double reg = 0.01;
  double confidence_alpha = 40.0;
  std::uint64_t seed = 0;
};

struct SgdConfig {
  int factors = 50;
  int epochs = 30;
  double learning_rate = 0.01;
  double reg = 0.02;
  std::uint64_t seed = 0;
};

// One factor row per user and per item, shared rank.
struct LatentModel {
  FactorMatrix user_factors;
  FactorMatrix item_factors;

  int rank() const { return static_cast<int>(item_factors.cols()); }
  bool operator==(const LatentModel& other) const {
    return user_factors == other.user_factors && item_factors == other.item_factors;
  }
};

// Uniform [-0.01, 0.01] entries drawn from Rng(seed): all user rows first,
// then item rows, row-major.
LatentModel InitLatent(Index users, Index items, int factors, std::uint64_t seed);

// Implicit-feedback ALS objective over every (user, item) cell:
//   sum c_ui (p_ui - u_u.v_i)^2 + reg (||U||^2 + ||V||^2)
// with p_ui = 1 on observed cells and c_ui = 1 + confidence_alpha * x_ui.
double AlsObjective(const LatentModel& model, const CsrMatrix& train, const AlsConfig& cfg);

// Normal equations of one row solve against fixed factors Y (gram = Y^T Y):
//   (Y^T Y + sum_obs (c - 1) y y^T + reg I) x = sum_obs c y
struct NormalEquations {
  Eigen::MatrixXd lhs;
  Eigen::VectorXd rhs;
};
NormalEquations AlsNormalEquations(const FactorMatrix& fixed, const Eigen::MatrixXd& gram,
                                   std::span<const Index> observed,
                                   std::span<const double> observed_values,
                                   const AlsConfig& cfg);
// Solves the system above by Cholesky. Throws NumericError on failure.
Eigen::VectorXd AlsSolveRow(const FactorMatrix& fixed, const Eigen::MatrixXd& gram,
                            std::span<const Index> observed,
                            std::span<const double> observed_values, const AlsConfig& cfg);

// Recomputes every user row against the frozen item factors.
void AlsUserStep(LatentModel& model, const CsrMatrix& train, const AlsConfig& cfg);
// Recomputes every item row; `train_t` is the transposed train matrix.
void AlsItemStep(LatentModel& model, const CsrMatrix& train_t, const AlsConfig& cfg);

// cfg.iterations rounds of user step then item step. When objective_trace is
// given it receives the objective after initialization and after each round.
LatentModel FitAls(const CsrMatrix& train, const AlsConfig& cfg = {},
                   std::vector<double>* objective_trace = nullptr);

// Factor row for a new user with the given items, against frozen item
// factors. Empty history gives the zero vector.
Eigen::VectorXd FoldInUser(const LatentModel& model, const AlsConfig& cfg,
                           std::span<const Index> items);
// Mirror solve for a new item seen by `users`.
Eigen::VectorXd FoldInItem(const LatentModel& model, const AlsConfig& cfg,
                           std::span<const Index> users);

// Pointwise loss 1/2 e^2 + 1/2 reg (||u||^2 + ||v||^2), e = 1 - u.v.
double FunkPointLoss(std::span<const double> u, std::span<const double> v, double reg);
// One simultaneous SGD update of (u, v) on an observed cell:
//   u += lr (e v - reg u),  v += lr (e u - reg v)
void FunkSgdStep(std::span<double> u, std::span<double> v, double learning_rate, double reg);

// Visits every observed cell once per epoch in an Rng(seed) shuffled order.
// Throws NumericError when a factor becomes non-finite.
LatentModel FitFunkSvd(const CsrMatrix& train, const SgdConfig& cfg = {});

std::vector<double> LatentScores(const LatentModel& model,
                                 const Eigen::Ref<const Eigen::VectorXd>& user_factor);

std::vector<Index> ScoreLatent(const LatentModel& model, const CsrMatrix& train,
                               const PopularityRanking& popularity, Index user, std::size_t k,
                               bool filter_seen = true);
std::vector<Index> ScoreLatent(const LatentModel& model, const CsrMatrix& train, Index user,
                               std::size_t k, bool filter_seen = true);

}  // namespace rsbench
