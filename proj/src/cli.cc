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

#include "rsbench/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsbench/bench.hpp"
#include "rsbench/dataset.hpp"
#include "rsbench/error.hpp"
#include "rsbench/manifest.hpp"
#include "rsbench/metrics.hpp"
#include "rsbench/model.hpp"
#include "rsbench/report.hpp"

namespace rsbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr std::size_t kLargeSweepSize = 10000000;

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::vector<std::size_t> ParseCounts(const std::string& text, const char* flag) {
  std::vector<std::size_t> out;
  for (const auto& part : SplitList(text)) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(part, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != part.size() || part.front() == '-') {
      throw InvalidArgument(std::string(flag) + ": \"" + part + "\" is not a count");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw InvalidArgument(std::string(flag) + " needs at least one value");
  return out;
}

void RequireExists(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no such file or directory: " + path);
}

std::string JoinedFingerprint(const std::vector<std::string>& files) {
  if (files.size() == 1) return FileFingerprint(files.front());
  std::string all;
  for (const auto& f : files) all += FileFingerprint(f);
  return Sha256Hex({reinterpret_cast<const unsigned char*>(all.data()), all.size()});
}

struct SplitDir {
  std::uint64_t seed;
  std::string path;
};

// Subdirectories named split-<seed>, ascending by seed.
std::vector<SplitDir> FindSplits(const std::string& root) {
  RequireExists(root);
  std::vector<SplitDir> splits;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_directory() || name.rfind("split-", 0) != 0) continue;
    try {
      splits.push_back({std::stoull(name.substr(6)), entry.path().string()});
    } catch (const std::exception&) {
    }
  }
  std::sort(splits.begin(), splits.end(),
            [](const SplitDir& a, const SplitDir& b) { return a.seed < b.seed; });
  if (splits.empty()) throw IoError("no split-<seed> directories under " + root);
  return splits;
}

std::string ModelFile(const std::string& models_dir, std::string_view model, std::uint64_t seed) {
  return (fs::path(models_dir) / std::string(model) / ("split-" + std::to_string(seed) + ".rsmd"))
      .string();
}

class Command {
 public:
  Command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
      : args_(args), out_(out), err_(err) {}

  int Run();

 private:
  void SetupIngest(CLI::App& app);
  void SetupPreprocess(CLI::App& app);
  void SetupSplit(CLI::App& app);
  void SetupTrain(CLI::App& app);
  void SetupEvaluate(CLI::App& app);
  void SetupBench(CLI::App& app);
  void SetupReport(CLI::App& app);

  void Ingest();
  void PreprocessCmd();
  void Split();
  void Train();
  void Evaluate();
  void Bench(const std::string& mode);
  void Report();

  ModelSpec BuildSpec(ModelKind kind) const;
  std::vector<ModelSpec> BuildSpecs() const;
  RunManifest StartManifest(json config) const;
  void FinishManifest(RunManifest manifest, const std::string& path) const;

  const std::vector<std::string>& args_;
  std::ostream& out_;
  std::ostream& err_;

  // Shared option storage.
  std::string input_, format_, data_, out_dir_, splits_dir_, models_dir_, model_name_;
  std::string model_list_ = "ease-r,slim,slim-enet,als,funk-svd,p3alpha,rp3beta,top-pop";
  std::string metrics_file_, bench_file_, report_format_ = "markdown";
  std::size_t min_interactions_ = 5;
  double binarize_threshold_ = 4.0;
  double ratio_ = 0.8;
  std::size_t n_seeds_ = 5;
  std::uint64_t seed_base_ = 1;
  std::string ks_ = "10";
  std::string metric_names_ = "precision,recall,ndcg,map";
  std::size_t groups_ = 10;
  std::string sizes_ = "100000,1000000,10000000";
  bool allow_large_ = false;
  std::uint64_t seed_ = 0;
  std::size_t reps_ = 3;
  std::size_t batch_ = 1000;
  std::size_t max_profile_ = 2;
  double holdout_fraction_ = 0.05;

  // Per-model overrides; unset flags keep the published defaults.
  std::optional<double> lambda_, alpha_, beta_, l1_ratio_, tol_, reg_, confidence_alpha_,
      learning_rate_;
  std::optional<std::size_t> topk_;
  std::optional<int> max_iters_, factors_, iterations_, epochs_;
  std::optional<std::uint64_t> model_seed_;
  std::optional<Index> max_items_;
  bool allow_negative_ = false;
};

void AddModelFlags(CLI::App& app, std::optional<double>& lambda, std::optional<double>& alpha,
                   std::optional<double>& beta, std::optional<double>& l1_ratio,
                   std::optional<double>& tol, std::optional<double>& reg,
                   std::optional<double>& confidence_alpha, std::optional<double>& learning_rate,
                   std::optional<std::size_t>& topk, std::optional<int>& max_iters,
                   std::optional<int>& factors, std::optional<int>& iterations,
                   std::optional<int>& epochs, std::optional<std::uint64_t>& seed,
                   std::optional<Index>& max_items, bool& allow_negative, bool seed_flag = true) {
  app.add_option("--lambda", lambda, "EASE-R L2 regularization (default 0.5)");
  app.add_option("--alpha", alpha,
                 "SLIM regularization strength (default 1e-4) or walk exponent (default 0.6)");
  app.add_option("--beta", beta, "RP3beta popularity exponent (default 0.4)");
  app.add_option("--topk", topk, "walk models: neighbors kept per item (default 100)");
  app.add_option("--l1-ratio", l1_ratio, "SLIM L1 share (default 1, slim-enet 0.5)");
  app.add_option("--max-iters", max_iters, "SLIM coordinate-descent sweeps (default 100)");
  app.add_option("--tol", tol, "SLIM convergence threshold (default 1e-4)");
  app.add_flag("--allow-negative", allow_negative, "SLIM: drop the w >= 0 constraint");
  app.add_option("--factors", factors, "latent factors (default 50)");
  app.add_option("--iterations", iterations, "ALS rounds (default 20)");
  app.add_option("--reg", reg, "ALS (0.01) / FunkSVD (0.02) regularization");
  app.add_option("--confidence-alpha", confidence_alpha, "ALS confidence scale (default 40)");
  app.add_option("--epochs", epochs, "FunkSVD epochs (default 30)");
  app.add_option("--learning-rate", learning_rate, "FunkSVD step size (default 0.01)");
  if (seed_flag) app.add_option("--seed", seed, "seed for ALS / FunkSVD initialization");
  app.add_option("--max-items", max_items, "dense Gram cap for EASE-R and SLIM");
}

void Command::SetupIngest(CLI::App& app) {
  app.add_option("--input", input_, "ratings file or directory")->required();
  app.add_option("--format", format_, "movielens-csv | tsv-quad | netflix-dir")->required();
  app.add_option("--out", out_dir_, "output dataset directory")->required();
}

void Command::SetupPreprocess(CLI::App& app) {
  app.add_option("--data", data_, "dataset directory from ingest")->required();
  app.add_option("--out", out_dir_, "output dataset directory")->required();
  app.add_option("--min-interactions", min_interactions_, "k-core threshold")
      ->capture_default_str();
  app.add_option("--binarize-threshold", binarize_threshold_, "minimum positive rating")
      ->capture_default_str();
}

void Command::SetupSplit(CLI::App& app) {
  app.add_option("--data", data_, "preprocessed dataset directory")->required();
  app.add_option("--out", out_dir_, "output directory for split-<seed>/")->required();
  app.add_option("--ratio", ratio_, "train share per user")->capture_default_str();
  app.add_option("--seeds", n_seeds_, "number of random splits")->capture_default_str();
  app.add_option("--seed-base", seed_base_, "first split seed")->capture_default_str();
}

void Command::SetupTrain(CLI::App& app) {
  app.add_option("--splits", splits_dir_, "directory from split")->required();
  app.add_option("--model", model_name_,
                 "ease-r | slim | slim-enet | als | funk-svd | p3alpha | rp3beta | top-pop")
      ->required();
  app.add_option("--out", models_dir_, "models directory")->required();
  AddModelFlags(app, lambda_, alpha_, beta_, l1_ratio_, tol_, reg_, confidence_alpha_,
                learning_rate_, topk_, max_iters_, factors_, iterations_, epochs_, model_seed_,
                max_items_, allow_negative_);
}

void Command::SetupEvaluate(CLI::App& app) {
  app.add_option("--splits", splits_dir_, "directory from split")->required();
  app.add_option("--models", models_dir_, "models directory from train")->required();
  app.add_option("--model", model_list_, "comma-separated models to evaluate (default: all found)");
  app.add_option("--k", ks_, "cutoffs, comma-separated")->capture_default_str();
  app.add_option("--metrics", metric_names_, "metrics, comma-separated")->capture_default_str();
  app.add_option("--groups", groups_, "user groups for per-group MAP (0 disables)")
      ->capture_default_str();
  app.add_option("--out", metrics_file_, "metrics report (default <models>/metrics.json)");
}

void Command::SetupBench(CLI::App& app) {
  app.require_subcommand(1);
  const auto common = [&](CLI::App& sub, bool raw_data) {
    sub.add_option("--data", data_,
                   raw_data ? "dataset directory from ingest" : "preprocessed dataset directory")
        ->required();
    sub.add_option("--models", model_list_, "comma-separated models")->capture_default_str();
    sub.add_option("--out", out_dir_, "output directory")->required();
    sub.add_option("--seed", seed_, "sampling seed")->capture_default_str();
    sub.add_option("--k", ks_, "cutoffs, comma-separated")->capture_default_str();
    AddModelFlags(sub, lambda_, alpha_, beta_, l1_ratio_, tol_, reg_, confidence_alpha_,
                  learning_rate_, topk_, max_iters_, factors_, iterations_, epochs_, model_seed_,
                  max_items_, allow_negative_, false);
  };
  auto* scale = app.add_subcommand("scale", "fit time and peak memory across dataset sizes");
  common(*scale, true);
  scale->add_option("--sizes", sizes_, "interaction counts, ascending")->capture_default_str();
  scale->add_option("--reps", reps_, "repetitions per fit")->capture_default_str();
  scale->add_flag("--allow-large", allow_large_, "run sizes of 10M interactions and above");
  scale->add_option("--min-interactions", min_interactions_, "k-core threshold")
      ->capture_default_str();
  scale->add_option("--binarize-threshold", binarize_threshold_, "minimum positive rating")
      ->capture_default_str();
  auto* latency = app.add_subcommand("latency", "top-k latency for a batch of users");
  common(*latency, false);
  latency->add_option("--batch", batch_, "users per batch")->capture_default_str();
  latency->add_option("--reps", reps_, "repetitions per fit")->capture_default_str();
  auto* cold = app.add_subcommand("coldstart", "accuracy on users truncated to a short profile");
  common(*cold, false);
  cold->add_option("--max-profile", max_profile_, "training items kept per cold user")
      ->capture_default_str();
  auto* inc = app.add_subcommand("incremental", "fold-in / direct scoring versus full refit");
  common(*inc, false);
  inc->add_option("--holdout-fraction", holdout_fraction_, "share of users held out")
      ->capture_default_str();
}

void Command::SetupReport(CLI::App& app) {
  app.add_option("--metrics", metrics_file_, "metrics report from evaluate");
  app.add_option("--bench", bench_file_, "bench.json from bench");
  app.add_option("--format", report_format_, "csv | markdown | structured")->capture_default_str();
  app.add_option("--out", out_dir_, "output directory")->required();
}

ModelSpec Command::BuildSpec(ModelKind kind) const {
  ModelSpec spec = ModelSpec::Defaults(kind);
  if (lambda_) spec.ease.lambda = *lambda_;
  if (max_items_) spec.ease.max_items = spec.slim.max_items = *max_items_;
  if (alpha_) spec.slim.alpha = spec.walk.alpha = *alpha_;
  if (l1_ratio_) spec.slim.l1_ratio = *l1_ratio_;
  if (max_iters_) spec.slim.max_iters = *max_iters_;
  if (tol_) spec.slim.tol = *tol_;
  if (allow_negative_) spec.slim.nonnegative = false;
  if (factors_) spec.als.factors = spec.sgd.factors = *factors_;
  if (iterations_) spec.als.iterations = *iterations_;
  if (reg_) spec.als.reg = spec.sgd.reg = *reg_;
  if (confidence_alpha_) spec.als.confidence_alpha = *confidence_alpha_;
  if (epochs_) spec.sgd.epochs = *epochs_;
  if (learning_rate_) spec.sgd.learning_rate = *learning_rate_;
  if (model_seed_) spec.als.seed = spec.sgd.seed = *model_seed_;
  if (beta_) spec.walk.beta = *beta_;
  if (topk_) spec.walk.topk = *topk_;
  return spec;
}

std::vector<ModelSpec> Command::BuildSpecs() const {
  std::vector<ModelSpec> specs;
  for (const auto& name : SplitList(model_list_)) specs.push_back(BuildSpec(ParseModelKind(name)));
  if (specs.empty()) throw InvalidArgument("--models needs at least one model");
  return specs;
}

RunManifest Command::StartManifest(json config) const {
  RunManifest m;
  m.command.push_back("rsbench");
  m.command.insert(m.command.end(), args_.begin(), args_.end());
  m.config = std::move(config);
  m.versions = {{"rsbench", kVersion}, {"matrix_format", 1}, {"model_format", 1}};
  m.started_at = UtcTimestamp();
  return m;
}

void Command::FinishManifest(RunManifest manifest, const std::string& path) const {
  manifest.finished_at = UtcTimestamp();
  WriteManifest(path, manifest);
}

void Command::Ingest() {
  RequireExists(input_);
  const RatingFormat format = ParseFormatTag(format_);
  RunManifest manifest = StartManifest({{"input", input_}, {"format", format_}});
  const Dataset d = RemapIds(ParseRatings(input_, format));
  SaveDataset(out_dir_, d);
  manifest.dataset_fingerprint = MatrixFingerprint(ToMatrix(d));
  FinishManifest(std::move(manifest), (fs::path(out_dir_) / kManifestName).string());
  out_ << "ingested " << d.interactions.size() << " interactions, " << d.n_users() << " users, "
       << d.n_items() << " items -> " << out_dir_ << '\n';
}

void Command::PreprocessCmd() {
  RequireExists(data_);
  RunManifest manifest = StartManifest(
      {{"min_interactions", min_interactions_}, {"binarize_threshold", binarize_threshold_}});
  const Dataset d = LoadDataset(data_);
  const Dataset p = Preprocess(d, {min_interactions_, binarize_threshold_});
  SaveDataset(out_dir_, p);
  manifest.dataset_fingerprint = MatrixFingerprint(ToMatrix(d));
  FinishManifest(std::move(manifest), (fs::path(out_dir_) / kManifestName).string());
  out_ << "kept " << p.interactions.size() << " of " << d.interactions.size()
       << " interactions, " << p.n_users() << " users, " << p.n_items() << " items\n";
}

void Command::Split() {
  RequireExists(data_);
  if (n_seeds_ < 1) throw InvalidArgument("--seeds must be >= 1");
  RunManifest manifest = StartManifest({{"ratio", ratio_}, {"seeds", n_seeds_}, {"seed_base", seed_base_}});
  const Dataset d = LoadDataset(data_);
  for (std::size_t k = 0; k < n_seeds_; ++k) {
    const std::uint64_t seed = seed_base_ + k;
    const EvalSplit split = HoldoutSplit(d, ratio_, seed);
    SaveSplit((fs::path(out_dir_) / ("split-" + std::to_string(seed))).string(), split);
    manifest.seeds.push_back(seed);
  }
  manifest.dataset_fingerprint = MatrixFingerprint(ToMatrix(d));
  FinishManifest(std::move(manifest), (fs::path(out_dir_) / kManifestName).string());
  out_ << "wrote " << n_seeds_ << " splits to " << out_dir_ << '\n';
}

void Command::Train() {
  const ModelSpec spec = BuildSpec(ParseModelKind(model_name_));
  const auto splits = FindSplits(splits_dir_);
  out_ << spec.ConfigEcho() << '\n';
  const fs::path dir = fs::path(models_dir_) / std::string(ModelName(spec.kind));
  fs::create_directories(dir);
  RunManifest manifest = StartManifest({{"model", ModelName(spec.kind)}, {"config", spec.ConfigJson()}});
  std::vector<std::string> inputs;
  for (const auto& s : splits) {
    const EvalSplit split = LoadSplit(s.path, s.seed);
    inputs.push_back((fs::path(s.path) / "train.rsm").string());
    const FittedModel model = FitModel(spec, split.train);
    SaveModel(ModelFile(models_dir_, ModelName(spec.kind), s.seed), model);
    manifest.seeds.push_back(s.seed);
  }
  manifest.dataset_fingerprint = JoinedFingerprint(inputs);
  FinishManifest(std::move(manifest), (dir / kManifestName).string());
  out_ << "trained " << ModelName(spec.kind) << " on " << splits.size() << " splits\n";
}

void Command::Evaluate() {
  const auto splits = FindSplits(splits_dir_);
  RequireExists(models_dir_);
  const auto ks = ParseCounts(ks_, "--k");
  std::vector<Metric> metrics;
  for (const auto& name : SplitList(metric_names_)) metrics.push_back(ParseMetric(name));
  if (metrics.empty()) throw InvalidArgument("--metrics needs at least one metric");

  // Models requested on the command line that have been trained.
  std::vector<ModelKind> kinds;
  for (const auto& name : SplitList(model_list_)) {
    const ModelKind kind = ParseModelKind(name);
    if (fs::exists(fs::path(models_dir_) / std::string(ModelName(kind)))) kinds.push_back(kind);
  }
  if (kinds.empty()) throw IoError("no trained models under " + models_dir_);

  const std::string out_file =
      metrics_file_.empty() ? (fs::path(models_dir_) / "metrics.json").string() : metrics_file_;
  RunManifest manifest = StartManifest(
      {{"k", ks}, {"metrics", SplitList(metric_names_)}, {"groups", groups_}});

  json reports = json::array();
  std::vector<std::string> inputs;
  for (ModelKind kind : kinds) {
    std::vector<MetricsReport> per_split;
    std::vector<std::vector<std::optional<double>>> group_maps;
    for (const auto& s : splits) {
      const std::string model_path = ModelFile(models_dir_, ModelName(kind), s.seed);
      RequireExists(model_path);
      inputs.push_back(model_path);
      const EvalSplit split = LoadSplit(s.path, s.seed);
      const FittedModel model = LoadModel(model_path);
      per_split.push_back(EvaluateModel(model, split, ks, metrics));
      if (groups_ > 0) {
        const auto groups =
            GroupUsersByProfile(split.train, std::min<std::size_t>(groups_, split.n_users()));
        group_maps.push_back(MapPerGroup(model, split, groups, ks.front()));
      }
    }
    MetricsReport report = AggregateSplits(per_split);
    if (!group_maps.empty()) {
      report.group_k = ks.front();
      report.group_map.resize(group_maps.front().size());
      for (std::size_t g = 0; g < report.group_map.size(); ++g) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& gm : group_maps) {
          if (g < gm.size() && gm[g]) {
            sum += *gm[g];
            ++n;
          }
        }
        if (n > 0) report.group_map[g] = sum / static_cast<double>(n);
      }
    }
    reports.push_back(ReportToJson(report));
    out_ << report.model;
    for (const auto& [metric, by_k] : report.values) {
      for (const auto& [k, v] : by_k) out_ << ' ' << metric << '@' << k << '=' << v;
    }
    out_ << '\n';
  }
  for (const auto& s : splits) manifest.seeds.push_back(s.seed);
  manifest.dataset_fingerprint = JoinedFingerprint(inputs);
  if (const auto parent = fs::path(out_file).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + out_file);
  out << reports.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + out_file);
  FinishManifest(std::move(manifest), out_file + ".manifest.json");
}

void Command::Bench(const std::string& mode) {
  RequireExists(data_);
  const auto specs = BuildSpecs();
  const auto ks = ParseCounts(ks_, "--k");
  fs::create_directories(out_dir_);
  json config = {{"mode", mode}, {"seed", seed_}, {"k", ks}};
  json model_configs = json::object();
  for (const auto& s : specs) model_configs[std::string(ModelName(s.kind))] = s.ConfigJson();
  config["models"] = model_configs;
  RunManifest manifest = StartManifest(config);
  manifest.seeds.push_back(seed_);
  const Dataset d = LoadDataset(data_);
  manifest.dataset_fingerprint = MatrixFingerprint(ToMatrix(d));

  std::vector<BenchRecord> records;
  json results = json::array();
  if (mode == "scale") {
    auto sizes = ParseCounts(sizes_, "--sizes");
    std::vector<std::size_t> run_sizes;
    for (std::size_t size : sizes) {
      if (size >= kLargeSweepSize && !allow_large_) {
        BenchRecord gated;
        gated.model = "*";
        gated.dataset_size = size;
        gated.skipped = true;
        gated.note = "sizes of 10M and above need --allow-large";
        records.push_back(gated);
      } else {
        run_sizes.push_back(size);
      }
    }
    auto swept = ScalabilitySweep(specs, d, run_sizes, seed_,
                                  {min_interactions_, binarize_threshold_}, reps_);
    records.insert(records.end(), swept.begin(), swept.end());
  } else if (mode == "latency") {
    const CsrMatrix train = ToMatrix(d);
    for (const auto& spec : specs) {
      FittedModel model = FitModel(ModelSpec::Defaults(ModelKind::kTopPop), train);
      BenchRecord record = MeasureTraining(spec, train, reps_, &model);
      const BenchRecord latency = MeasureLatency(model, train, batch_, ks.front(), seed_);
      record.latency_ms_per_1k = latency.latency_ms_per_1k;
      record.latency_total_ms = latency.latency_total_ms;
      record.latency_mean_ms = latency.latency_mean_ms;
      record.batch = latency.batch;
      record.sampled_with_replacement = latency.sampled_with_replacement;
      record.note = latency.note;
      records.push_back(std::move(record));
    }
  } else if (mode == "coldstart") {
    for (const auto& spec : specs) {
      results.push_back(ReportToJson(ColdStartEval(spec, d, max_profile_, seed_, ks)));
    }
  } else {
    for (const auto& spec : specs) {
      const IncrementalResult r = IncrementalUpdateEval(spec, d, holdout_fraction_, seed_, ks);
      json entry = {{"model", ModelName(spec.kind)},
                    {"supported", r.supported},
                    {"note", r.note},
                    {"incorporation", BenchRecordToJson(r.incorporation)},
                    {"retrain", BenchRecordToJson(r.retrain)},
                    {"delta", r.delta}};
      if (r.supported) {
        entry["incremental"] = ReportToJson(r.incremental);
        entry["retrained"] = ReportToJson(r.retrained);
        records.push_back(r.retrain);
      }
      results.push_back(entry);
    }
  }

  const fs::path dir(out_dir_);
  if (!records.empty()) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(BenchRecordToJson(r));
    std::ofstream(dir / "bench.json", std::ios::binary) << arr.dump(2) << '\n';
    std::ofstream(dir / "bench.csv", std::ios::binary) << BenchRecordsToCsv(records);
    out_ << BenchRecordsToCsv(records);
  }
  if (!results.empty()) {
    std::ofstream(dir / (mode + ".json"), std::ios::binary) << results.dump(2) << '\n';
    out_ << "wrote " << (dir / (mode + ".json")).string() << '\n';
  }
  FinishManifest(std::move(manifest), (dir / kManifestName).string());
}

void Command::Report() {
  if (metrics_file_.empty() && bench_file_.empty()) {
    throw InvalidArgument("report needs --metrics and/or --bench");
  }
  const ReportFormat format = ParseReportFormat(report_format_);
  std::vector<std::string> inputs;
  std::vector<MetricsReport> reports;
  std::vector<BenchRecord> records;
  const auto load_json = [&](const std::string& path) {
    RequireExists(path);
    inputs.push_back(path);
    std::ifstream in(path);
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw IoError("malformed JSON in " + path + ": " + e.what());
    }
  };
  if (!metrics_file_.empty()) {
    for (const auto& r : load_json(metrics_file_)) reports.push_back(ReportFromJson(r));
  }
  std::string bench_identity;
  if (!bench_file_.empty()) {
    const json doc = load_json(bench_file_);
    inputs.pop_back();
    // Timings differ run to run; fingerprint what was measured, not the numbers.
    json measured = json::array();
    for (const auto& r : doc) {
      records.push_back(BenchRecordFromJson(r));
      const BenchRecord& b = records.back();
      measured.push_back({b.model, b.config, b.dataset_size, b.repetitions, b.batch,
                          b.sampled_with_replacement, b.skipped});
    }
    bench_identity = measured.dump();
  }
  RunManifest manifest = StartManifest({{"format", report_format_}});
  const auto written = EmitReport(reports, records, format, out_dir_);
  std::string identity = inputs.empty() ? std::string() : JoinedFingerprint(inputs);
  identity += bench_identity;
  manifest.dataset_fingerprint =
      Sha256Hex({reinterpret_cast<const unsigned char*>(identity.data()), identity.size()});
  FinishManifest(std::move(manifest), (fs::path(out_dir_) / kManifestName).string());
  for (const auto& w : written) out_ << w << '\n';
}

int Command::Run() {
  CLI::App app{"rsbench: sparse recommender benchmark suite", "rsbench"};
  app.require_subcommand(1);
  SetupIngest(*app.add_subcommand("ingest", "parse a ratings file into a dataset directory"));
  SetupPreprocess(*app.add_subcommand("preprocess", "k-core filter and binarize"));
  SetupSplit(*app.add_subcommand("split", "randomized per-user train/test splits"));
  SetupTrain(*app.add_subcommand("train", "fit one model on every split"));
  SetupEvaluate(*app.add_subcommand("evaluate", "ranking metrics for trained models"));
  SetupBench(*app.add_subcommand("bench", "scalability, latency, cold-start, incremental"));
  SetupReport(*app.add_subcommand("report", "tables and plot data"));

  try {
    std::vector<std::string> reversed(args_.rbegin(), args_.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out_, err_);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "ingest") Ingest();
    else if (name == "preprocess") PreprocessCmd();
    else if (name == "split") Split();
    else if (name == "train") Train();
    else if (name == "evaluate") Evaluate();
    else if (name == "bench") Bench(sub->get_subcommands().front()->get_name());
    else if (name == "report") Report();
  } catch (const InvalidArgument& e) {
    err_ << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const IoError& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericError& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int RunCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command command(args, out, err);
  return command.Run();
}

}  // namespace rsbench
