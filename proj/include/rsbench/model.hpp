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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rsbench/factor.hpp"
#include "rsbench/graph.hpp"
#include "rsbench/linear.hpp"
#include "rsbench/ranking.hpp"
#include "rsbench/sparse.hpp"

namespace rsbench {

enum class ModelKind { kEaseR, kSlim, kSlimEnet, kAls, kFunkSvd, kP3Alpha, kRp3Beta, kTopPop };

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::kEaseR, ModelKind::kSlim,    ModelKind::kSlimEnet, ModelKind::kAls,
    ModelKind::kFunkSvd, ModelKind::kP3Alpha, ModelKind::kRp3Beta, ModelKind::kTopPop};

// "ease-r", "slim", "slim-enet", "als", "funk-svd", "p3alpha", "rp3beta", "top-pop".
std::string_view ModelName(ModelKind kind);
// Throws InvalidArgument for unknown names.
ModelKind ParseModelKind(std::string_view name);

// Model kind plus the configuration of every family; only the block
// matching `kind` is used.
struct ModelSpec {
  ModelKind kind = ModelKind::kTopPop;
  EaseConfig ease;
  SlimConfig slim;
  AlsConfig als;
  SgdConfig sgd;
  WalkConfig walk;

  // Published defaults: EASE-R lambda 0.5; SLIM alpha 1e-4 (l1_ratio 1, or
  // 0.5 for slim-enet); ALS 50 factors, 20 iterations; RP3beta alpha 0.6,
  // beta 0.4, topk 100 (P3Alpha shares alpha and topk).
  static ModelSpec Defaults(ModelKind kind);

  // Configuration of the active family only.
  nlohmann::json ConfigJson() const;
  // Reads a ConfigJson() document back; missing keys keep their defaults.
  static ModelSpec FromJson(ModelKind kind, const nlohmann::json& config);
  // "key=value" pairs in ConfigJson() order, space separated.
  std::string ConfigEcho() const;
};

// Any fitted model behind one scoring interface. Every model stores the
// popularity order of its training matrix for list padding.
class FittedModel {
 public:
  using Payload = std::variant<SparseWeights, LatentModel, std::monostate>;

  FittedModel(ModelSpec spec, Payload payload, PopularityRanking popularity, Index n_users,
              Index n_items);

  ModelKind kind() const { return spec_.kind; }
  const ModelSpec& spec() const { return spec_; }
  Index n_users() const { return n_users_; }
  Index n_items() const { return n_items_; }
  const PopularityRanking& popularity() const { return popularity_; }

  const SparseWeights* weights() const { return std::get_if<SparseWeights>(&payload_); }
  const LatentModel* latent() const { return std::get_if<LatentModel>(&payload_); }

  // Top-k for a training user. `train` must be the matrix the model was fitted
  // on (or one with the same shape).
  std::vector<Index> Recommend(const CsrMatrix& train, Index user, std::size_t k,
                               bool filter_seen = true) const;

  // Top-k for a user known only by an item history (sorted). Item and graph
  // models score directly, ALS folds the user in first, TopPopular ignores
  // the history apart from filtering. FunkSVD throws InvalidArgument.
  std::vector<Index> RecommendFromHistory(std::span<const Index> history, std::size_t k,
                                          bool filter_seen = true) const;

  bool operator==(const FittedModel& other) const;

 private:
  ModelSpec spec_;
  Payload payload_;
  PopularityRanking popularity_;
  Index n_users_ = 0;
  Index n_items_ = 0;
};

FittedModel FitModel(const ModelSpec& spec, const CsrMatrix& train);

// Little-endian layout:
//   "RSMD" magic, u32 version (1), string kind, string config JSON,
//   u64 users, u64 items, u64 n, u32 popularity order[n], f64 counts[n],
//   then the payload: a matrix block (item and graph models), two factor
//   blocks "u64 rows, u64 cols, f64 row-major data" (latent models), or
//   nothing (top-pop). Strings are u64 length + bytes.
void WriteModel(std::ostream& out, const FittedModel& model);
FittedModel ReadModel(std::istream& in);
void SaveModel(const std::string& path, const FittedModel& model);
FittedModel LoadModel(const std::string& path);

}  // namespace rsbench
