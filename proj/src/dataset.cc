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

#include "rsbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "rsbench/error.hpp"
#include "rsbench/random.hpp"

namespace rsbench {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMovielensHeader = "userId,movieId,rating,timestamp";

[[noreturn]] void Malformed(const std::string& path, std::size_t line_no,
                            std::string_view line, std::string_view why) {
  throw InvalidArgument(path + ":" + std::to_string(line_no) + ": " + std::string(why) +
                        ": \"" + std::string(line) + "\"");
}

std::vector<std::string_view> SplitFields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
bool ParseNumber(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string_view StripCr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Seconds since the epoch at midnight UTC of a YYYY-MM-DD date.
bool ParseDate(std::string_view s, std::int64_t& out) {
  const auto parts = SplitFields(s, '-');
  int y = 0;
  unsigned m = 0, d = 0;
  if (parts.size() != 3 || !ParseNumber(parts[0], y) || !ParseNumber(parts[1], m) ||
      !ParseNumber(parts[2], d)) {
    return false;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return false;
  out = std::chrono::sys_seconds(std::chrono::sys_days(ymd)).time_since_epoch().count();
  return true;
}

void ParseDelimited(const std::string& path, char sep, bool header,
                    std::vector<RawRecord>& out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ratings file: " + path);
  std::string raw;
  std::size_t line_no = 0;
  if (header) {
    ++line_no;
    if (!std::getline(in, raw) || StripCr(raw) != kMovielensHeader) {
      Malformed(path, line_no, raw, "expected header " + std::string(kMovielensHeader));
    }
  }
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = StripCr(raw);
    if (line.empty()) continue;
    const auto f = SplitFields(line, sep);
    if (f.size() != 4) Malformed(path, line_no, line, "expected 4 fields");
    RawRecord rec;
    rec.user = std::string(f[0]);
    rec.item = std::string(f[1]);
    if (rec.user.empty() || rec.item.empty()) Malformed(path, line_no, line, "empty id");
    if (!ParseNumber(f[2], rec.rating) || !std::isfinite(rec.rating)) {
      Malformed(path, line_no, line, "bad rating");
    }
    if (!ParseNumber(f[3], rec.timestamp)) Malformed(path, line_no, line, "bad timestamp");
    out.push_back(std::move(rec));
  }
}

void ParseNetflixFile(const std::string& path, std::vector<RawRecord>& out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ratings file: " + path);
  std::string raw;
  std::string item;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = StripCr(raw);
    if (line.empty()) continue;
    if (line.back() == ':') {
      item = std::string(line.substr(0, line.size() - 1));
      if (item.empty()) Malformed(path, line_no, line, "empty item header");
      continue;
    }
    if (item.empty()) Malformed(path, line_no, line, "rating before any \"ItemID:\" header");
    const auto f = SplitFields(line, ',');
    if (f.size() != 3) Malformed(path, line_no, line, "expected user,rating,date");
    RawRecord rec;
    rec.user = std::string(f[0]);
    rec.item = item;
    if (rec.user.empty()) Malformed(path, line_no, line, "empty user id");
    if (!ParseNumber(f[1], rec.rating) || !std::isfinite(rec.rating)) {
      Malformed(path, line_no, line, "bad rating");
    }
    if (!ParseDate(f[2], rec.timestamp)) Malformed(path, line_no, line, "bad date");
    out.push_back(std::move(rec));
  }
}

// Keeps only indices flagged in `keep_*`, assigning new indices in the old
// order.
Dataset Compact(const Dataset& d, const std::vector<char>& keep_user,
                const std::vector<char>& keep_item,
                const std::vector<Interaction>& interactions) {
  Dataset out;
  out.implicit = d.implicit;
  std::vector<Index> user_map(keep_user.size(), -1);
  std::vector<Index> item_map(keep_item.size(), -1);
  for (Index u = 0; u < d.n_users(); ++u) {
    if (keep_user[u]) user_map[u] = out.users.Intern(d.users.External(u));
  }
  for (Index i = 0; i < d.n_items(); ++i) {
    if (keep_item[i]) item_map[i] = out.items.Intern(d.items.External(i));
  }
  out.interactions.reserve(interactions.size());
  for (const auto& x : interactions) {
    if (user_map[x.user] < 0 || item_map[x.item] < 0) continue;
    out.interactions.push_back({user_map[x.user], item_map[x.item], x.rating, x.timestamp});
  }
  return out;
}

Dataset CompactInteractions(const Dataset& d, std::vector<Interaction> interactions) {
  std::vector<char> keep_user(static_cast<std::size_t>(d.n_users()), 0);
  std::vector<char> keep_item(static_cast<std::size_t>(d.n_items()), 0);
  for (const auto& x : interactions) {
    keep_user[x.user] = 1;
    keep_item[x.item] = 1;
  }
  return Compact(d, keep_user, keep_item, interactions);
}

}  // namespace

RatingFormat ParseFormatTag(std::string_view tag) {
  if (tag == "movielens-csv") return RatingFormat::kMovielensCsv;
  if (tag == "tsv-quad") return RatingFormat::kTsvQuad;
  if (tag == "netflix-dir") return RatingFormat::kNetflixDir;
  throw InvalidArgument("unknown format tag \"" + std::string(tag) +
                        "\" (expected movielens-csv, tsv-quad, netflix-dir)");
}

std::string_view FormatTag(RatingFormat format) {
  switch (format) {
    case RatingFormat::kMovielensCsv: return "movielens-csv";
    case RatingFormat::kTsvQuad: return "tsv-quad";
    case RatingFormat::kNetflixDir: return "netflix-dir";
  }
  return "";
}

std::vector<RawRecord> ParseRatings(const std::string& path, RatingFormat format) {
  std::vector<RawRecord> out;
  switch (format) {
    case RatingFormat::kMovielensCsv:
      ParseDelimited(path, ',', true, out);
      break;
    case RatingFormat::kTsvQuad:
      ParseDelimited(path, '\t', false, out);
      break;
    case RatingFormat::kNetflixDir: {
      std::error_code ec;
      if (fs::is_directory(path, ec)) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(path)) {
          if (entry.is_regular_file()) files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) ParseNetflixFile(f, out);
      } else {
        ParseNetflixFile(path, out);
      }
      break;
    }
  }
  return out;
}

Index IdLookup::Intern(const std::string& external) {
  auto [it, inserted] = dense_.try_emplace(external, static_cast<Index>(external_.size()));
  if (inserted) external_.push_back(external);
  return it->second;
}

Index IdLookup::Find(const std::string& external) const {
  const auto it = dense_.find(external);
  return it == dense_.end() ? -1 : it->second;
}

Dataset RemapIds(const std::vector<RawRecord>& records) {
  Dataset d;
  std::unordered_map<std::uint64_t, std::size_t> position;
  for (const auto& r : records) {
    const Index u = d.users.Intern(r.user);
    const Index i = d.items.Intern(r.item);
    const auto key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(i);
    const auto [it, inserted] = position.try_emplace(key, d.interactions.size());
    if (inserted) {
      d.interactions.push_back({u, i, r.rating, r.timestamp});
    } else {
      d.interactions[it->second].rating = r.rating;
      d.interactions[it->second].timestamp = r.timestamp;
    }
  }
  return d;
}

Dataset KcoreFilter(const Dataset& d, std::size_t min_interactions) {
  if (min_interactions < 1) throw InvalidArgument("min_interactions must be >= 1");
  std::vector<char> alive_user(static_cast<std::size_t>(d.n_users()), 1);
  std::vector<char> alive_item(static_cast<std::size_t>(d.n_items()), 1);
  std::vector<Interaction> current = d.interactions;
  while (true) {
    std::vector<std::size_t> user_deg(alive_user.size(), 0), item_deg(alive_item.size(), 0);
    for (const auto& x : current) {
      ++user_deg[x.user];
      ++item_deg[x.item];
    }
    bool removed = false;
    for (std::size_t u = 0; u < alive_user.size(); ++u) {
      if (alive_user[u] && user_deg[u] < min_interactions) {
        alive_user[u] = 0;
        removed = true;
      }
    }
    for (std::size_t i = 0; i < alive_item.size(); ++i) {
      if (alive_item[i] && item_deg[i] < min_interactions) {
        alive_item[i] = 0;
        removed = true;
      }
    }
    if (!removed) break;
    std::erase_if(current, [&](const Interaction& x) {
      return !alive_user[x.user] || !alive_item[x.item];
    });
  }
  return Compact(d, alive_user, alive_item, current);
}

Dataset Binarize(const Dataset& d, double threshold) {
  if (d.implicit) return d;
  std::vector<Interaction> kept;
  kept.reserve(d.interactions.size());
  for (const auto& x : d.interactions) {
    if (x.rating >= threshold) kept.push_back({x.user, x.item, 1.0, x.timestamp});
  }
  Dataset out = CompactInteractions(d, std::move(kept));
  out.implicit = true;
  return out;
}

Dataset Subsample(const Dataset& d, std::size_t n, std::uint64_t seed) {
  const std::size_t total = d.interactions.size();
  if (n > total) {
    throw InvalidArgument("cannot sample " + std::to_string(n) + " interactions from " +
                          std::to_string(total));
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates: the first n slots are a uniform sample.
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.Below(total - k));
    std::swap(order[k], order[j]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end());
  std::vector<Interaction> sample;
  sample.reserve(n);
  for (std::size_t k : order) sample.push_back(d.interactions[k]);
  return CompactInteractions(d, std::move(sample));
}

Dataset Redensify(const Dataset& d) { return CompactInteractions(d, d.interactions); }

CsrMatrix ToMatrix(const Dataset& d) {
  std::vector<Triplet> t;
  t.reserve(d.interactions.size());
  for (const auto& x : d.interactions) t.push_back({x.user, x.item, x.rating});
  return BuildMatrix(t, d.n_users(), d.n_items());
}

Dataset FromMatrix(const CsrMatrix& m, IdLookup users, IdLookup items) {
  if (users.size() != m.rows() || items.size() != m.cols()) {
    throw InvalidArgument("lookup sizes do not match matrix dimensions");
  }
  Dataset d;
  d.users = std::move(users);
  d.items = std::move(items);
  d.interactions.reserve(m.nnz());
  for (Index u = 0; u < m.rows(); ++u) {
    const auto idx = m.RowIndices(u);
    const auto base = static_cast<std::size_t>(m.row_offsets()[u]);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      d.interactions.push_back({u, idx[k], m.ValueAt(base + k), 0});
    }
  }
  return d;
}

std::vector<Index> EvalSplit::EvaluatedUsers() const {
  std::vector<Index> users;
  for (std::size_t u = 0; u < test_relevant.size(); ++u) {
    if (!test_relevant[u].empty()) users.push_back(static_cast<Index>(u));
  }
  return users;
}

std::size_t TrainCount(std::size_t n, double train_ratio) {
  if (n == 0) return 0;
  // The epsilon keeps products like 10 * 0.8 from flooring to 7.
  const auto t = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_ratio + 1e-9));
  return std::clamp<std::size_t>(t, 1, n);
}

EvalSplit HoldoutSplit(const Dataset& d, double train_ratio, std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw InvalidArgument("train_ratio must lie in (0, 1)");
  }
  std::vector<std::vector<Index>> per_user(static_cast<std::size_t>(d.n_users()));
  for (const auto& x : d.interactions) per_user[x.user].push_back(x.item);

  EvalSplit split;
  split.seed = seed;
  split.test_relevant.resize(per_user.size());
  std::vector<Triplet> train;
  train.reserve(d.interactions.size());
  Rng rng(seed);
  for (std::size_t u = 0; u < per_user.size(); ++u) {
    auto& items = per_user[u];
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    rng.Shuffle(std::span<Index>(items));
    const std::size_t n_train = TrainCount(items.size(), train_ratio);
    for (std::size_t k = 0; k < n_train; ++k) {
      train.push_back({static_cast<Index>(u), items[k], 1.0});
    }
    auto& test = split.test_relevant[u];
    test.assign(items.begin() + static_cast<std::ptrdiff_t>(n_train), items.end());
    std::sort(test.begin(), test.end());
  }
  split.train = BuildMatrix(train, d.n_users(), d.n_items());
  return split;
}

void SaveSplit(const std::string& dir, const EvalSplit& split) {
  fs::create_directories(dir);
  SaveMatrix((fs::path(dir) / "train.rsm").string(), split.train);
  std::vector<Triplet> test;
  for (std::size_t u = 0; u < split.test_relevant.size(); ++u) {
    for (Index i : split.test_relevant[u]) test.push_back({static_cast<Index>(u), i, 1.0});
  }
  SaveMatrix((fs::path(dir) / "test.rsm").string(),
             BuildMatrix(test, split.n_users(), split.n_items()));
}

EvalSplit LoadSplit(const std::string& dir, std::uint64_t seed) {
  EvalSplit split;
  split.seed = seed;
  split.train = LoadMatrix((fs::path(dir) / "train.rsm").string());
  const CsrMatrix test = LoadMatrix((fs::path(dir) / "test.rsm").string());
  if (test.rows() != split.train.rows() || test.cols() != split.train.cols()) {
    throw IoError("train and test matrices in " + dir + " have different shapes");
  }
  split.test_relevant.resize(static_cast<std::size_t>(test.rows()));
  for (Index u = 0; u < test.rows(); ++u) {
    const auto idx = test.RowIndices(u);
    split.test_relevant[u].assign(idx.begin(), idx.end());
  }
  return split;
}

void SaveLookup(const std::string& path, const IdLookup& lookup) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (Index k = 0; k < lookup.size(); ++k) out << k << '\t' << lookup.External(k) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

IdLookup LoadLookup(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  IdLookup lookup;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tab = line.find('\t');
    Index dense = -1;
    if (tab == std::string::npos ||
        !ParseNumber(std::string_view(line).substr(0, tab), dense) ||
        dense != lookup.size()) {
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed lookup line");
    }
    if (lookup.Intern(line.substr(tab + 1)) != dense) {
      throw IoError(path + ":" + std::to_string(line_no) + ": duplicate external id");
    }
  }
  return lookup;
}

void SaveDataset(const std::string& dir, const Dataset& d) {
  fs::create_directories(dir);
  SaveMatrix((fs::path(dir) / "ratings.rsm").string(), ToMatrix(d));
  SaveLookup((fs::path(dir) / "users.tsv").string(), d.users);
  SaveLookup((fs::path(dir) / "items.tsv").string(), d.items);
  const std::string kind = (fs::path(dir) / "feedback.txt").string();
  std::ofstream out(kind);
  out << (d.implicit ? "implicit" : "explicit") << '\n';
  if (!out) throw IoError("failed writing " + kind);
}

Dataset LoadDataset(const std::string& dir) {
  Dataset d = FromMatrix(LoadMatrix((fs::path(dir) / "ratings.rsm").string()),
                         LoadLookup((fs::path(dir) / "users.tsv").string()),
                         LoadLookup((fs::path(dir) / "items.tsv").string()));
  std::ifstream kind(fs::path(dir) / "feedback.txt");
  std::string tag;
  if (kind >> tag) {
    if (tag != "implicit" && tag != "explicit") {
      throw IoError("unknown feedback kind \"" + tag + "\" in " + dir);
    }
    d.implicit = tag == "implicit";
  }
  return d;
}

}  // namespace rsbench
