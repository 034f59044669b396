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

#include "rsbench/model.hpp"

#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "rsbench/error.hpp"

namespace rsbench {

namespace {

constexpr char kModelMagic[5] = "RSMD";
constexpr std::uint32_t kModelVersion = 1;

struct NamedKind {
  ModelKind kind;
  std::string_view name;
};

constexpr NamedKind kNames[] = {
    {ModelKind::kEaseR, "ease-r"},     {ModelKind::kSlim, "slim"},
    {ModelKind::kSlimEnet, "slim-enet"}, {ModelKind::kAls, "als"},
    {ModelKind::kFunkSvd, "funk-svd"}, {ModelKind::kP3Alpha, "p3alpha"},
    {ModelKind::kRp3Beta, "rp3beta"},  {ModelKind::kTopPop, "top-pop"},
};

template <typename T>
void ReadKey(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void WriteFactors(std::ostream& out, const FactorMatrix& m) {
  detail::WriteLe<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  detail::WriteLe<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index k = 0; k < m.size(); ++k) detail::WriteLe<double>(out, m.data()[k]);
}

FactorMatrix ReadFactors(std::istream& in) {
  const auto rows = detail::ReadLe<std::uint64_t>(in);
  const auto cols = detail::ReadLe<std::uint64_t>(in);
  if (rows > INT32_MAX || cols > 100000) throw IoError("corrupt factor block");
  FactorMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = detail::ReadLe<double>(in);
  return m;
}

}  // namespace

std::string_view ModelName(ModelKind kind) {
  for (const auto& n : kNames) {
    if (n.kind == kind) return n.name;
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.kind;
  }
  throw InvalidArgument("unknown model \"" + std::string(name) +
                        "\" (expected ease-r, slim, slim-enet, als, funk-svd, p3alpha, "
                        "rp3beta, top-pop)");
}

ModelSpec ModelSpec::Defaults(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  if (kind == ModelKind::kSlimEnet) spec.slim = SlimElasticNetConfig();
  return spec;
}

nlohmann::json ModelSpec::ConfigJson() const {
  switch (kind) {
    case ModelKind::kEaseR:
      return {{"lambda", ease.lambda}, {"max_items", ease.max_items}};
    case ModelKind::kSlim:
    case ModelKind::kSlimEnet:
      return {{"alpha", slim.alpha},         {"l1_ratio", slim.l1_ratio},
              {"max_iters", slim.max_iters}, {"max_items", slim.max_items},
              {"nonnegative", slim.nonnegative}, {"tol", slim.tol}};
    case ModelKind::kAls:
      return {{"confidence_alpha", als.confidence_alpha}, {"factors", als.factors},
              {"iterations", als.iterations}, {"reg", als.reg}, {"seed", als.seed}};
    case ModelKind::kFunkSvd:
      return {{"epochs", sgd.epochs}, {"factors", sgd.factors},
              {"learning_rate", sgd.learning_rate}, {"reg", sgd.reg}, {"seed", sgd.seed}};
    case ModelKind::kP3Alpha:
      return {{"alpha", walk.alpha}, {"topk", walk.topk}};
    case ModelKind::kRp3Beta:
      return {{"alpha", walk.alpha}, {"beta", walk.beta}, {"topk", walk.topk}};
    case ModelKind::kTopPop:
      return nlohmann::json::object();
  }
  return nlohmann::json::object();
}

ModelSpec ModelSpec::FromJson(ModelKind kind, const nlohmann::json& config) {
  ModelSpec spec = Defaults(kind);
  ReadKey(config, "lambda", spec.ease.lambda);
  if (kind == ModelKind::kEaseR) ReadKey(config, "max_items", spec.ease.max_items);
  if (kind == ModelKind::kSlim || kind == ModelKind::kSlimEnet) {
    ReadKey(config, "alpha", spec.slim.alpha);
    ReadKey(config, "l1_ratio", spec.slim.l1_ratio);
    ReadKey(config, "max_iters", spec.slim.max_iters);
    ReadKey(config, "max_items", spec.slim.max_items);
    ReadKey(config, "nonnegative", spec.slim.nonnegative);
    ReadKey(config, "tol", spec.slim.tol);
  }
  if (kind == ModelKind::kAls) {
    ReadKey(config, "confidence_alpha", spec.als.confidence_alpha);
    ReadKey(config, "factors", spec.als.factors);
    ReadKey(config, "iterations", spec.als.iterations);
    ReadKey(config, "reg", spec.als.reg);
    ReadKey(config, "seed", spec.als.seed);
  }
  if (kind == ModelKind::kFunkSvd) {
    ReadKey(config, "epochs", spec.sgd.epochs);
    ReadKey(config, "factors", spec.sgd.factors);
    ReadKey(config, "learning_rate", spec.sgd.learning_rate);
    ReadKey(config, "reg", spec.sgd.reg);
    ReadKey(config, "seed", spec.sgd.seed);
  }
  if (kind == ModelKind::kP3Alpha || kind == ModelKind::kRp3Beta) {
    ReadKey(config, "alpha", spec.walk.alpha);
    ReadKey(config, "topk", spec.walk.topk);
    if (kind == ModelKind::kRp3Beta) ReadKey(config, "beta", spec.walk.beta);
  }
  return spec;
}

std::string ModelSpec::ConfigEcho() const {
  std::ostringstream echo;
  echo << "model=" << ModelName(kind);
  const nlohmann::json config = ConfigJson();
  for (const auto& [key, value] : config.items()) echo << ' ' << key << '=' << value.dump();
  return echo.str();
}

FittedModel::FittedModel(ModelSpec spec, Payload payload, PopularityRanking popularity,
                         Index n_users, Index n_items)
    : spec_(std::move(spec)),
      payload_(std::move(payload)),
      popularity_(std::move(popularity)),
      n_users_(n_users),
      n_items_(n_items) {}

std::vector<Index> FittedModel::Recommend(const CsrMatrix& train, Index user, std::size_t k,
                                          bool filter_seen) const {
  if (train.cols() != n_items_ || train.rows() != n_users_) {
    throw InvalidArgument("train matrix shape does not match the fitted model");
  }
  if (user < 0 || user >= n_users_) {
    throw InvalidArgument("user " + std::to_string(user) + " out of range");
  }
  if (const auto* w = weights()) return ScoreItemModel(*w, train, popularity_, user, k, filter_seen);
  if (const auto* l = latent()) return ScoreLatent(*l, train, popularity_, user, k, filter_seen);
  const std::vector<double> none(static_cast<std::size_t>(n_items_), 0.0);
  return RankTopK(none, train.RowIndices(user), popularity_, k, filter_seen);
}

std::vector<Index> FittedModel::RecommendFromHistory(std::span<const Index> history,
                                                     std::size_t k, bool filter_seen) const {
  std::vector<double> scores;
  if (const auto* w = weights()) {
    scores = ItemModelScores(*w, history);
  } else if (const auto* l = latent()) {
    if (kind() != ModelKind::kAls) {
      throw InvalidArgument(std::string(ModelName(kind())) +
                            " cannot score users outside its training data");
    }
    scores = LatentScores(*l, FoldInUser(*l, spec_.als, history));
  } else {
    scores.assign(static_cast<std::size_t>(n_items_), 0.0);
  }
  return RankTopK(scores, history, popularity_, k, filter_seen);
}

bool FittedModel::operator==(const FittedModel& other) const {
  return spec_.kind == other.spec_.kind && spec_.ConfigJson() == other.spec_.ConfigJson() &&
         payload_ == other.payload_ && popularity_ == other.popularity_ &&
         n_users_ == other.n_users_ && n_items_ == other.n_items_;
}

FittedModel FitModel(const ModelSpec& spec, const CsrMatrix& train) {
  PopularityRanking popularity = FitTopPopular(train);
  FittedModel::Payload payload = std::monostate{};
  switch (spec.kind) {
    case ModelKind::kEaseR:
      payload = FitEase(train, spec.ease);
      break;
    case ModelKind::kSlim:
    case ModelKind::kSlimEnet:
      payload = FitSlim(train, spec.slim);
      break;
    case ModelKind::kAls:
      payload = FitAls(train, spec.als);
      break;
    case ModelKind::kFunkSvd:
      payload = FitFunkSvd(train, spec.sgd);
      break;
    case ModelKind::kP3Alpha:
      payload = FitP3Alpha(train, spec.walk);
      break;
    case ModelKind::kRp3Beta:
      payload = FitRp3Beta(train, spec.walk);
      break;
    case ModelKind::kTopPop:
      break;
  }
  return FittedModel(spec, std::move(payload), std::move(popularity), train.rows(),
                     train.cols());
}

void WriteModel(std::ostream& out, const FittedModel& model) {
  detail::WriteMagic(out, kModelMagic);
  detail::WriteLe<std::uint32_t>(out, kModelVersion);
  detail::WriteString(out, std::string(ModelName(model.kind())));
  detail::WriteString(out, model.spec().ConfigJson().dump());
  detail::WriteLe<std::uint64_t>(out, static_cast<std::uint64_t>(model.n_users()));
  detail::WriteLe<std::uint64_t>(out, static_cast<std::uint64_t>(model.n_items()));
  const auto& pop = model.popularity();
  detail::WriteLe<std::uint64_t>(out, pop.order.size());
  for (Index i : pop.order) detail::WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(i));
  for (double c : pop.counts) detail::WriteLe<double>(out, c);
  if (const auto* w = model.weights()) {
    WriteMatrix(out, w->matrix());
  } else if (const auto* l = model.latent()) {
    WriteFactors(out, l->user_factors);
    WriteFactors(out, l->item_factors);
  }
  if (!out) throw IoError("failed writing model");
}

FittedModel ReadModel(std::istream& in) {
  detail::ExpectMagic(in, kModelMagic);
  const auto version = detail::ReadLe<std::uint32_t>(in);
  if (version != kModelVersion) {
    throw IoError("unsupported model format version " + std::to_string(version));
  }
  ModelKind kind;
  nlohmann::json config;
  try {
    kind = ParseModelKind(detail::ReadString(in));
    config = nlohmann::json::parse(detail::ReadString(in));
  } catch (const std::exception& e) {
    throw IoError(std::string("corrupt model header: ") + e.what());
  }
  ModelSpec spec = ModelSpec::FromJson(kind, config);
  const auto users = detail::ReadLe<std::uint64_t>(in);
  const auto items = detail::ReadLe<std::uint64_t>(in);
  const auto n = detail::ReadLe<std::uint64_t>(in);
  if (users > INT32_MAX || items > INT32_MAX || n != items) throw IoError("corrupt model header");
  PopularityRanking pop;
  pop.order.resize(n);
  pop.counts.resize(n);
  for (auto& i : pop.order) i = static_cast<Index>(detail::ReadLe<std::uint32_t>(in));
  for (auto& c : pop.counts) c = detail::ReadLe<double>(in);

  FittedModel::Payload payload = std::monostate{};
  switch (kind) {
    case ModelKind::kAls:
    case ModelKind::kFunkSvd: {
      LatentModel latent;
      latent.user_factors = ReadFactors(in);
      latent.item_factors = ReadFactors(in);
      payload = std::move(latent);
      break;
    }
    case ModelKind::kTopPop:
      break;
    default:
      try {
        payload = SparseWeights(ReadMatrix(in));
      } catch (const InvalidArgument& e) {
        throw IoError(std::string("corrupt model weights: ") + e.what());
      }
  }
  return FittedModel(std::move(spec), std::move(payload), std::move(pop),
                     static_cast<Index>(users), static_cast<Index>(items));
}

void SaveModel(const std::string& path, const FittedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  WriteModel(out, model);
}

FittedModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return ReadModel(in);
}

}  // namespace rsbench
