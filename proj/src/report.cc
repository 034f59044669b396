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

#include "rsbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rsbench/error.hpp"

namespace rsbench {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string Fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::string Compact(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::string EscapeXml(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string TickLabel(double v) {
  const double e = std::log10(v);
  if (std::abs(e - std::round(e)) < 1e-9) {
    const int p = static_cast<int>(std::lround(e));
    if (p >= -3 && p <= 5) return Compact(std::pow(10.0, p));
    return "1e" + std::to_string(p);
  }
  return Compact(v);
}

void WriteFile(const fs::path& path, const std::string& content,
               std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
  written.push_back(path.string());
}

}  // namespace

ReportFormat ParseReportFormat(std::string_view tag) {
  if (tag == "csv") return ReportFormat::kCsv;
  if (tag == "markdown") return ReportFormat::kMarkdown;
  if (tag == "structured") return ReportFormat::kStructured;
  throw InvalidArgument("unknown report format \"" + std::string(tag) +
                        "\" (expected csv, markdown, structured)");
}

std::string AccuracyTableMarkdown(std::span<const MetricsReport> reports, std::size_t k) {
  const std::string ks = std::to_string(k);
  std::ostringstream md;
  md << "| Model | Precision@" << ks << " | Recall@" << ks << " | NDCG@" << ks << " |\n";
  md << "|---|---|---|---|\n";
  const auto cell = [&](const MetricsReport& r, Metric m) -> std::string {
    const auto it = r.values.find(MetricName(m));
    if (it == r.values.end() || !it->second.contains(k)) return "n/a";
    return Fixed(it->second.at(k), 3);
  };
  for (const auto& r : reports) {
    md << "| " << r.model << " | " << cell(r, Metric::kPrecision) << " | "
       << cell(r, Metric::kRecall) << " | " << cell(r, Metric::kNdcg) << " |\n";
  }
  return md.str();
}

std::string ScalabilityTableMarkdown(std::span<const BenchRecord> records) {
  std::ostringstream md;
  md << "| Model | Training Time (min) | Peak Memory (GB) |\n";
  md << "|---|---|---|\n";
  for (const auto& r : records) {
    if (r.skipped) continue;
    md << "| " << r.model << " | " << Fixed(r.fit_seconds / 60.0, 4) << " | "
       << Fixed(static_cast<double>(r.peak_bytes) / 1e9, 3) << " |\n";
  }
  return md.str();
}

std::string PlotCsv(std::span<const PlotPoint> points) {
  std::ostringstream csv;
  csv << "x,y,series\n";
  for (const auto& p : points) csv << Compact(p.x) << ',' << Compact(p.y) << ',' << p.series << '\n';
  return csv.str();
}

std::vector<PlotPoint> GroupMapPoints(std::span<const MetricsReport> reports) {
  std::vector<PlotPoint> points;
  for (const auto& r : reports) {
    for (std::size_t g = 0; g < r.group_map.size(); ++g) {
      if (r.group_map[g]) points.push_back({static_cast<double>(g), *r.group_map[g], r.model});
    }
  }
  return points;
}

std::vector<PlotPoint> LatencyPoints(std::span<const BenchRecord> records) {
  std::vector<PlotPoint> points;
  for (const auto& r : records) {
    if (r.skipped || !(r.latency_ms_per_1k > 0.0)) continue;
    points.push_back({static_cast<double>(r.dataset_size), r.latency_ms_per_1k, r.model});
  }
  return points;
}

std::vector<double> LogTicks(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("log ticks need 0 < lo <= hi");
  const int first = static_cast<int>(std::floor(std::log10(lo) + 1e-12));
  int last = static_cast<int>(std::ceil(std::log10(hi) - 1e-12));
  if (last <= first) last = first + 1;
  std::vector<double> ticks;
  for (int p = first; p <= last; ++p) ticks.push_back(std::pow(10.0, p));
  return ticks;
}

std::string ScatterSvg(std::span<const PlotPoint> points, const SvgOptions& options) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (!points.empty()) {
    x_lo = x_hi = points.front().x;
    y_lo = y_hi = points.front().y;
    for (const auto& p : points) {
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.y);
      y_hi = std::max(y_hi, p.y);
    }
  }
  if (x_hi == x_lo) {
    x_lo -= 1;
    x_hi += 1;
  }
  std::vector<double> y_ticks;
  if (options.log_y) {
    if (points.empty()) {
      y_lo = 1;
      y_hi = 10;
    }
    if (!(y_lo > 0.0)) throw InvalidArgument("log-scale plot needs positive y values");
    y_ticks = LogTicks(y_lo, y_hi);
    y_lo = y_ticks.front();
    y_hi = y_ticks.back();
  } else {
    y_lo = std::min(0.0, y_lo);
    if (y_hi <= y_lo) y_hi = y_lo + 1;
    for (int t = 0; t <= 5; ++t) y_ticks.push_back(y_lo + (y_hi - y_lo) * t / 5.0);
  }
  const auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto sy = [&](double y) {
    const double f = options.log_y ? (std::log10(y) - std::log10(y_lo)) /
                                         (std::log10(y_hi) - std::log10(y_lo))
                                   : (y - y_lo) / (y_hi - y_lo);
    return kTop + (1.0 - f) * plot_h;
  };

  std::vector<std::string> series;
  for (const auto& p : points) {
    if (std::find(series.begin(), series.end(), p.series) == series.end()) series.push_back(p.series);
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << EscapeXml(options.title) << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (double t : y_ticks) {
    const double y = sy(t);
    svg << "<g class=\"ytick\"><line x1=\"" << kLeft - 5 << "\" y1=\"" << Fixed(y, 2)
        << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << Fixed(y, 2)
        << "\" stroke=\"#dddddd\"/><text x=\"" << kLeft - 8 << "\" y=\"" << Fixed(y + 4, 2)
        << "\" text-anchor=\"end\" font-size=\"11\">"
        << (options.log_y ? TickLabel(t) : Fixed(t, 3)) << "</text></g>\n";
  }
  // Distinct x positions get a tick each.
  std::vector<double> xs;
  for (const auto& p : points) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    svg << "<text x=\"" << Fixed(sx(x), 2) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << Compact(x) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">" << EscapeXml(options.x_label)
      << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << kTop + plot_h / 2 << ")\">" << EscapeXml(options.y_label)
      << (options.log_y ? " (log scale)" : "") << "</text>\n";
  for (const auto& p : points) {
    const auto s = static_cast<std::size_t>(
        std::find(series.begin(), series.end(), p.series) - series.begin());
    svg << "<circle cx=\"" << Fixed(sx(p.x), 2) << "\" cy=\"" << Fixed(sy(p.y), 2)
        << "\" r=\"4\" fill=\"" << kPalette[s % std::size(kPalette)] << "\"><title>"
        << EscapeXml(p.series) << ": " << Compact(p.y) << "</title></circle>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(s);
    svg << "<circle cx=\"" << kLeft + plot_w + 20 << "\" cy=\"" << y << "\" r=\"4\" fill=\""
        << kPalette[s % std::size(kPalette)] << "\"/><text x=\"" << kLeft + plot_w + 30
        << "\" y=\"" << y + 4 << "\" font-size=\"11\">" << EscapeXml(series[s]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> EmitReport(std::span<const MetricsReport> reports,
                                    std::span<const BenchRecord> records, ReportFormat format,
                                    const std::string& out_dir) {
  if (reports.empty() && records.empty()) throw InvalidArgument("nothing to report");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  const fs::path dir(out_dir);
  std::vector<std::string> written;

  switch (format) {
    case ReportFormat::kMarkdown: {
      std::ostringstream md;
      if (!reports.empty()) {
        md << "## Recommendation accuracy\n\n" << AccuracyTableMarkdown(reports) << '\n';
      }
      if (!records.empty()) {
        md << "## Scalability\n\n" << ScalabilityTableMarkdown(records) << '\n';
      }
      WriteFile(dir / "report.md", md.str(), written);
      break;
    }
    case ReportFormat::kCsv:
      if (!reports.empty()) WriteFile(dir / "metrics.csv", ReportsToCsv(reports), written);
      if (!records.empty()) WriteFile(dir / "bench.csv", BenchRecordsToCsv(records), written);
      break;
    case ReportFormat::kStructured: {
      nlohmann::json doc;
      doc["reports"] = nlohmann::json::array();
      for (const auto& r : reports) doc["reports"].push_back(ReportToJson(r));
      doc["scalability"] = BenchSummaryJson(records);
      WriteFile(dir / "report.json", doc.dump(2) + "\n", written);
      break;
    }
  }

  const auto groups = GroupMapPoints(reports);
  if (!groups.empty()) {
    WriteFile(dir / "group_map.csv", PlotCsv(groups), written);
    WriteFile(dir / "group_map.svg",
              ScatterSvg(groups, {"MAP by user group", "User group", "MAP", false}), written);
  }
  const auto latency = LatencyPoints(records);
  if (!latency.empty()) {
    WriteFile(dir / "latency.csv", PlotCsv(latency), written);
    WriteFile(dir / "latency.svg",
              ScatterSvg(latency, {"Average latency per 1,000 users", "Interactions",
                                   "Latency (ms)", true}),
              written);
  }
  return written;
}

}  // namespace rsbench
