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

#include "rsbench/factor.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "rsbench/error.hpp"
#include "rsbench/graph.hpp"
#include "rsbench/parallel.hpp"
#include "rsbench/random.hpp"

namespace rsbench {

namespace {

constexpr double kInitRange = 0.01;

void FillUniform(FactorMatrix& m, Rng& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.Uniform(-kInitRange, kInitRange);
  }
}

LatentModel InitLatent(Index users, Index items, int factors, Rng& rng) {
  if (factors < 1) throw InvalidArgument("factors must be >= 1");
  LatentModel model;
  model.user_factors.resize(users, factors);
  model.item_factors.resize(items, factors);
  FillUniform(model.user_factors, rng);
  FillUniform(model.item_factors, rng);
  return model;
}

void CheckAlsConfig(const AlsConfig& cfg) {
  if (cfg.factors < 1 || cfg.iterations < 1) {
    throw InvalidArgument("ALS needs factors >= 1 and iterations >= 1");
  }
  if (!(cfg.reg > 0.0) || cfg.confidence_alpha < 0.0) {
    throw InvalidArgument("ALS needs reg > 0 and confidence_alpha >= 0");
  }
}

// Solves all rows of `target` against `fixed` using the rows of `observed`.
void SolveAllRows(FactorMatrix& target, const FactorMatrix& fixed, const CsrMatrix& observed,
                  const AlsConfig& cfg) {
  const Eigen::MatrixXd gram = fixed.transpose() * fixed;
  ParallelFor(static_cast<std::size_t>(observed.rows()), [&](std::size_t r) {
    const auto row = static_cast<Index>(r);
    target.row(row) =
        AlsSolveRow(fixed, gram, observed.RowIndices(row), observed.RowValues(row), cfg)
            .transpose();
  });
}

}  // namespace

LatentModel InitLatent(Index users, Index items, int factors, std::uint64_t seed) {
  Rng rng(seed);
  return InitLatent(users, items, factors, rng);
}

double AlsObjective(const LatentModel& model, const CsrMatrix& train, const AlsConfig& cfg) {
  const auto& users = model.user_factors;
  const auto& items = model.item_factors;
  // Sum of squared predictions over all cells, then corrected on observed cells.
  const Eigen::MatrixXd uu = users.transpose() * users;
  const Eigen::MatrixXd vv = items.transpose() * items;
  double total = uu.cwiseProduct(vv).sum();
  for (Index u = 0; u < train.rows(); ++u) {
    const auto idx = train.RowIndices(u);
    const auto base = static_cast<std::size_t>(train.row_offsets()[u]);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double s = users.row(u).dot(items.row(idx[k]));
      const double c = 1.0 + cfg.confidence_alpha * train.ValueAt(base + k);
      total += c * (1.0 - s) * (1.0 - s) - s * s;
    }
  }
  return total + cfg.reg * (users.squaredNorm() + items.squaredNorm());
}

NormalEquations AlsNormalEquations(const FactorMatrix& fixed, const Eigen::MatrixXd& gram,
                                   std::span<const Index> observed,
                                   std::span<const double> observed_values,
                                   const AlsConfig& cfg) {
  const auto f = fixed.cols();
  NormalEquations eq{gram, Eigen::VectorXd::Zero(f)};
  eq.lhs.diagonal().array() += cfg.reg;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double x = observed_values.empty() ? 1.0 : observed_values[k];
    const double c = 1.0 + cfg.confidence_alpha * x;
    const auto y = fixed.row(observed[k]).transpose();
    eq.lhs.selfadjointView<Eigen::Lower>().rankUpdate(y, c - 1.0);
    eq.rhs.noalias() += c * y;
  }
  eq.lhs = eq.lhs.selfadjointView<Eigen::Lower>();
  return eq;
}

Eigen::VectorXd AlsSolveRow(const FactorMatrix& fixed, const Eigen::MatrixXd& gram,
                            std::span<const Index> observed,
                            std::span<const double> observed_values, const AlsConfig& cfg) {
  if (observed.empty()) return Eigen::VectorXd::Zero(fixed.cols());
  const NormalEquations eq = AlsNormalEquations(fixed, gram, observed, observed_values, cfg);
  Eigen::LLT<Eigen::MatrixXd> llt(eq.lhs);
  if (llt.info() != Eigen::Success) {
    throw NumericError("ALS normal equations are not positive definite");
  }
  return llt.solve(eq.rhs);
}

void AlsUserStep(LatentModel& model, const CsrMatrix& train, const AlsConfig& cfg) {
  SolveAllRows(model.user_factors, model.item_factors, train, cfg);
}

void AlsItemStep(LatentModel& model, const CsrMatrix& train_t, const AlsConfig& cfg) {
  SolveAllRows(model.item_factors, model.user_factors, train_t, cfg);
}

LatentModel FitAls(const CsrMatrix& train, const AlsConfig& cfg,
                   std::vector<double>* objective_trace) {
  CheckAlsConfig(cfg);
  LatentModel model = InitLatent(train.rows(), train.cols(), cfg.factors, cfg.seed);
  const CsrMatrix train_t = Transpose(train);
  if (objective_trace != nullptr) {
    objective_trace->clear();
    objective_trace->push_back(AlsObjective(model, train, cfg));
  }
  for (int round = 0; round < cfg.iterations; ++round) {
    AlsUserStep(model, train, cfg);
    AlsItemStep(model, train_t, cfg);
    if (objective_trace != nullptr) objective_trace->push_back(AlsObjective(model, train, cfg));
  }
  if (!model.user_factors.allFinite() || !model.item_factors.allFinite()) {
    throw NumericError("ALS produced non-finite factors");
  }
  return model;
}

Eigen::VectorXd FoldInUser(const LatentModel& model, const AlsConfig& cfg,
                           std::span<const Index> items) {
  for (Index i : items) {
    if (i < 0 || i >= model.item_factors.rows()) {
      throw InvalidArgument("fold-in item " + std::to_string(i) + " out of range");
    }
  }
  const Eigen::MatrixXd gram = model.item_factors.transpose() * model.item_factors;
  return AlsSolveRow(model.item_factors, gram, items, {}, cfg);
}

Eigen::VectorXd FoldInItem(const LatentModel& model, const AlsConfig& cfg,
                           std::span<const Index> users) {
  for (Index u : users) {
    if (u < 0 || u >= model.user_factors.rows()) {
      throw InvalidArgument("fold-in user " + std::to_string(u) + " out of range");
    }
  }
  const Eigen::MatrixXd gram = model.user_factors.transpose() * model.user_factors;
  return AlsSolveRow(model.user_factors, gram, users, {}, cfg);
}

double FunkPointLoss(std::span<const double> u, std::span<const double> v, double reg) {
  double dot = 0.0, norms = 0.0;
  for (std::size_t f = 0; f < u.size(); ++f) {
    dot += u[f] * v[f];
    norms += u[f] * u[f] + v[f] * v[f];
  }
  const double e = 1.0 - dot;
  return 0.5 * e * e + 0.5 * reg * norms;
}

void FunkSgdStep(std::span<double> u, std::span<double> v, double learning_rate, double reg) {
  double dot = 0.0;
  for (std::size_t f = 0; f < u.size(); ++f) dot += u[f] * v[f];
  const double e = 1.0 - dot;
  for (std::size_t f = 0; f < u.size(); ++f) {
    const double uf = u[f];
    const double vf = v[f];
    u[f] = uf + learning_rate * (e * vf - reg * uf);
    v[f] = vf + learning_rate * (e * uf - reg * vf);
  }
}

LatentModel FitFunkSvd(const CsrMatrix& train, const SgdConfig& cfg) {
  if (cfg.factors < 1 || cfg.epochs < 1) {
    throw InvalidArgument("FunkSVD needs factors >= 1 and epochs >= 1");
  }
  if (!(cfg.learning_rate > 0.0) || !(cfg.reg > 0.0)) {
    throw InvalidArgument("FunkSVD needs learning_rate > 0 and reg > 0");
  }
  Rng rng(cfg.seed);
  LatentModel model = InitLatent(train.rows(), train.cols(), cfg.factors, rng);
  if (train.nnz() == 0) return model;

  std::vector<std::pair<Index, Index>> cells;
  cells.reserve(train.nnz());
  for (Index u = 0; u < train.rows(); ++u) {
    for (Index i : train.RowIndices(u)) cells.emplace_back(u, i);
  }
  const auto f = static_cast<std::size_t>(cfg.factors);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.Shuffle(std::span(cells));
    for (const auto& [u, i] : cells) {
      FunkSgdStep({model.user_factors.row(u).data(), f}, {model.item_factors.row(i).data(), f},
                  cfg.learning_rate, cfg.reg);
    }
    if (!model.user_factors.allFinite() || !model.item_factors.allFinite()) {
      throw NumericError("FunkSVD diverged at epoch " + std::to_string(epoch + 1) +
                         "; use a smaller learning_rate");
    }
  }
  return model;
}

std::vector<double> LatentScores(const LatentModel& model,
                                 const Eigen::Ref<const Eigen::VectorXd>& user_factor) {
  const Eigen::VectorXd s = model.item_factors * user_factor;
  return std::vector<double>(s.data(), s.data() + s.size());
}

std::vector<Index> ScoreLatent(const LatentModel& model, const CsrMatrix& train,
                               const PopularityRanking& popularity, Index user, std::size_t k,
                               bool filter_seen) {
  if (user < 0 || user >= model.user_factors.rows() || user >= train.rows()) {
    throw InvalidArgument("user " + std::to_string(user) + " out of range");
  }
  const Eigen::VectorXd factor = model.user_factors.row(user).transpose();
  const auto scores = LatentScores(model, factor);
  return RankTopK(scores, train.RowIndices(user), popularity, k, filter_seen);
}

std::vector<Index> ScoreLatent(const LatentModel& model, const CsrMatrix& train, Index user,
                               std::size_t k, bool filter_seen) {
  return ScoreLatent(model, train, FitTopPopular(train), user, k, filter_seen);
}

}  // namespace rsbench
