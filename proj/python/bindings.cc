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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <json.hpp>

#include "rsbench/bench.hpp"
#include "rsbench/cli.hpp"
#include "rsbench/dataset.hpp"
#include "rsbench/error.hpp"
#include "rsbench/manifest.hpp"
#include "rsbench/metrics.hpp"
#include "rsbench/model.hpp"

namespace py = pybind11;
using namespace rsbench;

namespace {

CsrMatrix MatrixFromTriplets(Index rows, Index cols, const std::vector<Index>& r,
                             const std::vector<Index>& c, const std::vector<double>& v) {
  if (r.size() != c.size() || (!v.empty() && v.size() != r.size())) {
    throw InvalidArgument("row, col and value lists must have equal length");
  }
  std::vector<Triplet> t;
  t.reserve(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) t.push_back({r[k], c[k], v.empty() ? 1.0 : v[k]});
  return BuildMatrix(t, rows, cols);
}

py::array_t<double> ToDense(const CsrMatrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto a = out.mutable_unchecked<2>();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) a(r, c) = 0.0;
  for (Index r = 0; r < m.rows(); ++r) {
    const auto idx = m.RowIndices(r);
    const auto val = m.RowValues(r);
    for (std::size_t k = 0; k < idx.size(); ++k) a(r, idx[k]) = val.empty() ? 1.0 : val[k];
  }
  return out;
}

ModelSpec SpecFrom(const std::string& name, const std::string& config_json) {
  const ModelKind kind = ParseModelKind(name);
  if (config_json.empty()) return ModelSpec::Defaults(kind);
  return ModelSpec::FromJson(kind, nlohmann::json::parse(config_json));
}

std::vector<Metric> MetricsFrom(const std::vector<std::string>& names) {
  if (names.empty()) return {std::begin(kAllMetrics), std::end(kAllMetrics)};
  std::vector<Metric> out;
  for (const auto& n : names) out.push_back(ParseMetric(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Recommender benchmarking core";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  py::class_<CsrMatrix>(m, "CsrMatrix")
      .def_property_readonly("shape", [](const CsrMatrix& x) { return py::make_tuple(x.rows(), x.cols()); })
      .def_property_readonly("nnz", &CsrMatrix::nnz)
      .def("row", [](const CsrMatrix& x, Index r) {
        const auto idx = x.RowIndices(r);
        return std::vector<Index>(idx.begin(), idx.end());
      })
      .def("to_dense", &ToDense);
  m.def("matrix_from_triplets", &MatrixFromTriplets, py::arg("rows"), py::arg("cols"),
        py::arg("row"), py::arg("col"), py::arg("value") = std::vector<double>());

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("n_users", &Dataset::n_users)
      .def_property_readonly("n_items", &Dataset::n_items)
      .def_property_readonly("n_interactions", [](const Dataset& d) { return d.interactions.size(); })
      .def_readonly("implicit", &Dataset::implicit)
      .def_property_readonly("user_ids", [](const Dataset& d) { return d.users.externals(); })
      .def_property_readonly("item_ids", [](const Dataset& d) { return d.items.externals(); })
      .def("to_matrix", &ToMatrix)
      .def("save", [](const Dataset& d, const std::string& dir) { SaveDataset(dir, d); });

  m.def("read_ratings", [](const std::string& path, const std::string& format) {
    return RemapIds(ParseRatings(path, ParseFormatTag(format)));
  }, py::arg("path"), py::arg("format") = "movielens-csv");
  m.def("load_dataset", &LoadDataset, py::arg("dir"));
  m.def("kcore_filter", &KcoreFilter, py::arg("dataset"), py::arg("min_interactions") = 5);
  m.def("binarize", &Binarize, py::arg("dataset"), py::arg("threshold") = 4.0);
  m.def("subsample", &Subsample, py::arg("dataset"), py::arg("n"), py::arg("seed"));

  py::class_<EvalSplit>(m, "EvalSplit")
      .def_readonly("train", &EvalSplit::train)
      .def_readonly("test_relevant", &EvalSplit::test_relevant)
      .def_readonly("seed", &EvalSplit::seed)
      .def("evaluated_users", &EvalSplit::EvaluatedUsers);
  m.def("holdout_split", &HoldoutSplit, py::arg("dataset"), py::arg("train_ratio") = 0.8,
        py::arg("seed") = 0);

  py::class_<FittedModel>(m, "FittedModel")
      .def_property_readonly("name", [](const FittedModel& f) { return std::string(ModelName(f.kind())); })
      .def_property_readonly("config_json", [](const FittedModel& f) { return f.spec().ConfigJson().dump(); })
      .def_property_readonly("n_users", &FittedModel::n_users)
      .def_property_readonly("n_items", &FittedModel::n_items)
      .def("recommend", &FittedModel::Recommend, py::arg("train"), py::arg("user"), py::arg("k") = 10,
           py::arg("filter_seen") = true)
      .def("recommend_from_history",
           [](const FittedModel& f, std::vector<Index> history, std::size_t k, bool filter_seen) {
             std::sort(history.begin(), history.end());
             history.erase(std::unique(history.begin(), history.end()), history.end());
             return f.RecommendFromHistory(history, k, filter_seen);
           },
           py::arg("history"), py::arg("k") = 10, py::arg("filter_seen") = true)
      .def("item_weights",
           [](const FittedModel& f) -> py::object {
             if (f.weights() == nullptr) return py::none();
             return ToDense(f.weights()->matrix());
           },
           "Dense item-item weights for item and graph models, else None.")
      .def("save", [](const FittedModel& f, const std::string& path) { SaveModel(path, f); })
      .def("__eq__", [](const FittedModel& a, const FittedModel& b) { return a == b; });
  m.def("model_names", [] {
    std::vector<std::string> names;
    for (ModelKind k : kAllModelKinds) names.emplace_back(ModelName(k));
    return names;
  });
  m.def("default_config_json", [](const std::string& name) {
    return ModelSpec::Defaults(ParseModelKind(name)).ConfigJson().dump();
  });
  m.def("_fit", [](const std::string& name, const CsrMatrix& train, const std::string& config) {
    const ModelSpec spec = SpecFrom(name, config);
    py::gil_scoped_release release;
    return FitModel(spec, train);
  });
  m.def("load_model", &LoadModel, py::arg("path"));

  m.def("precision_at_k", [](const std::vector<Index>& r, const std::vector<Index>& rel, std::size_t k) {
    return PrecisionAtK(r, rel, k);
  });
  m.def("recall_at_k", [](const std::vector<Index>& r, const std::vector<Index>& rel, std::size_t k) {
    return RecallAtK(r, rel, k);
  });
  m.def("ndcg_at_k", [](const std::vector<Index>& r, const std::vector<Index>& rel, std::size_t k) {
    return NdcgAtK(r, rel, k);
  });
  m.def("map_at_k", [](const std::vector<Index>& r, const std::vector<Index>& rel, std::size_t k) {
    return AveragePrecisionAtK(r, rel, k);
  });
  m.def("_evaluate",
        [](const FittedModel& model, const EvalSplit& split, const std::vector<std::size_t>& ks,
           const std::vector<std::string>& metrics) {
          const auto list = MetricsFrom(metrics);
          return ReportToJson(EvaluateModel(model, split, ks, list)).dump();
        });

  m.def("_measure_training",
        [](const std::string& name, const CsrMatrix& train, const std::string& config,
           std::size_t repetitions) {
          return BenchRecordToJson(MeasureTraining(SpecFrom(name, config), train, repetitions)).dump();
        });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = RunCommand(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
