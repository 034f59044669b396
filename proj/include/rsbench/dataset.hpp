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

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rsbench/sparse.hpp"

namespace rsbench {

struct RawRecord {
  std::string user;
  std::string item;
  double rating = 0.0;
  std::int64_t timestamp = 0;

  bool operator==(const RawRecord&) const = default;
};

enum class RatingFormat {
  kMovielensCsv,  // header "userId,movieId,rating,timestamp"
  kTsvQuad,       // user<TAB>item<TAB>rating<TAB>timestamp, no header
  kNetflixDir,    // per-item files: "ItemID:" then "user,rating,YYYY-MM-DD"
};

// Accepts "movielens-csv", "tsv-quad", "netflix-dir".
RatingFormat ParseFormatTag(std::string_view tag);
std::string_view FormatTag(RatingFormat format);

// Reads every record of a ratings file (or, for netflix-dir, every regular
// file in the directory in lexicographic order; a single file is accepted
// too). Malformed lines raise InvalidArgument with file and line number.
std::vector<RawRecord> ParseRatings(const std::string& path, RatingFormat format);

// Bidirectional external-id <-> dense-index table.
class IdLookup {
 public:
  // Index of `external`, assigning the next dense index on first sight.
  Index Intern(const std::string& external);
  // -1 when unknown.
  Index Find(const std::string& external) const;
  const std::string& External(Index dense) const { return external_[dense]; }
  Index size() const { return static_cast<Index>(external_.size()); }
  const std::vector<std::string>& externals() const { return external_; }

  bool operator==(const IdLookup& other) const { return external_ == other.external_; }

 private:
  std::vector<std::string> external_;
  std::unordered_map<std::string, Index> dense_;
};

struct Interaction {
  Index user = 0;
  Index item = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;

  bool operator==(const Interaction&) const = default;
};

// Rating tuples over dense indices. Every user and item index has a lookup
// entry, and (user, item) pairs are unique.
struct Dataset {
  std::vector<Interaction> interactions;
  IdLookup users;
  IdLookup items;
  // Set by Binarize: ratings are 0/1 preference signals, not star values.
  bool implicit = false;

  Index n_users() const { return users.size(); }
  Index n_items() const { return items.size(); }

  bool operator==(const Dataset&) const = default;
};

// Dense indices in first-appearance order; a repeated (user, item) pair
// overwrites the earlier rating and timestamp in place.
Dataset RemapIds(const std::vector<RawRecord>& records);

// Repeatedly drops users and items with fewer than min_interactions
// interactions until none remain, then re-densifies (survivors keep their
// relative order).
Dataset KcoreFilter(const Dataset& d, std::size_t min_interactions = 5);

// Keeps interactions with rating >= threshold as rating 1.0, drops the rest,
// and re-densifies so every index still has at least one interaction. The
// result is marked implicit; an implicit input is returned unchanged.
Dataset Binarize(const Dataset& d, double threshold = 4.0);

// Uniform sample of exactly n interactions without replacement. Sampled
// interactions keep their original relative order before re-densification,
// so n == total reproduces d.
Dataset Subsample(const Dataset& d, std::size_t n, std::uint64_t seed);

// Drops indices with no interactions, keeping relative order.
Dataset Redensify(const Dataset& d);

// users x items matrix; binary when every rating is 1.
CsrMatrix ToMatrix(const Dataset& d);
// Inverse of ToMatrix given the lookups (timestamps are not carried).
Dataset FromMatrix(const CsrMatrix& m, IdLookup users, IdLookup items);

struct EvalSplit {
  CsrMatrix train;                               // binary users x items
  std::vector<std::vector<Index>> test_relevant;  // per user, sorted
  std::uint64_t seed = 0;

  Index n_users() const { return train.rows(); }
  Index n_items() const { return train.cols(); }
  // Users whose test set is nonempty.
  std::vector<Index> EvaluatedUsers() const;

  bool operator==(const EvalSplit&) const = default;
};

// Number of training interactions for a user with n interactions:
// max(1, floor(n * train_ratio)) when n > 0.
std::size_t TrainCount(std::size_t n, double train_ratio);

// Per-user stratified random split. Users are visited in index order; each
// user's items (sorted) are shuffled by one Rng(seed) stream and the first
// TrainCount() go to train.
EvalSplit HoldoutSplit(const Dataset& d, double train_ratio, std::uint64_t seed);

// Split stored as two matrices: train and test relevance.
void SaveSplit(const std::string& dir, const EvalSplit& split);
EvalSplit LoadSplit(const std::string& dir, std::uint64_t seed);

// "dense_index<TAB>external_id" per line.
void SaveLookup(const std::string& path, const IdLookup& lookup);
IdLookup LoadLookup(const std::string& path);

// Dataset directory: ratings.rsm, users.tsv, items.tsv.
// dir/ratings.rsm, users.tsv, items.tsv and feedback.txt ("implicit" or
// "explicit"). Timestamps are not stored.
void SaveDataset(const std::string& dir, const Dataset& d);
Dataset LoadDataset(const std::string& dir);

}  // namespace rsbench
