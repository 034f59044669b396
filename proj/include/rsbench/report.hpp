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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsbench/bench.hpp"
#include "rsbench/metrics.hpp"

namespace rsbench {

enum class ReportFormat { kCsv, kMarkdown, kStructured };
ReportFormat ParseReportFormat(std::string_view tag);  // "csv", "markdown", "structured"

// | Model | Precision@k | Recall@k | NDCG@k |, one row per report.
std::string AccuracyTableMarkdown(std::span<const MetricsReport> reports, std::size_t k = 10);
// | Model | Training Time (min) | Peak Memory (GB) |, one row per record.
std::string ScalabilityTableMarkdown(std::span<const BenchRecord> records);

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  std::string series;
};

// "x,y,series" rows.
std::string PlotCsv(std::span<const PlotPoint> points);
// One point per (model, group) with a value; x is the group index.
std::vector<PlotPoint> GroupMapPoints(std::span<const MetricsReport> reports);
// One point per non-skipped record with a latency; x is the dataset size.
std::vector<PlotPoint> LatencyPoints(std::span<const BenchRecord> records);

struct SvgOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
};

// Self-contained SVG scatter plot, one color per series. With log_y the y
// axis spans whole decades and is ticked at every power of ten.
std::string ScatterSvg(std::span<const PlotPoint> points, const SvgOptions& options);
// Powers of ten covering [lo, hi] (both > 0).
std::vector<double> LogTicks(double lo, double hi);

// Writes the report in `format` plus, when the inputs carry them, the
// per-group MAP and latency plot data (group_map.csv/.svg, latency.csv/.svg)
// into out_dir. Returns the written paths. Throws InvalidArgument when both
// inputs are empty.
std::vector<std::string> EmitReport(std::span<const MetricsReport> reports,
                                    std::span<const BenchRecord> records, ReportFormat format,
                                    const std::string& out_dir);

}  // namespace rsbench
