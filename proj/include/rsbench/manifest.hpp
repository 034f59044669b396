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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsbench/sparse.hpp"

namespace rsbench {

inline constexpr const char* kVersion = "0.1.0";

// Everything needed to re-run a pipeline stage. Timestamps are the only
// fields expected to change between identical runs.
struct RunManifest {
  std::vector<std::string> command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;
  std::string dataset_fingerprint;
  nlohmann::json versions = nlohmann::json::object();
  std::string started_at;
  std::string finished_at;

  bool operator==(const RunManifest&) const = default;
};

// Lowercase hex SHA-256.
std::string Sha256Hex(std::span<const unsigned char> bytes);
// SHA-256 of the matrix's binary serialization.
std::string MatrixFingerprint(const CsrMatrix& m);
std::string FileFingerprint(const std::string& path);

// UTC, ISO-8601 with seconds.
std::string UtcTimestamp();

nlohmann::json ManifestToJson(const RunManifest& m);
RunManifest ManifestFromJson(const nlohmann::json& j);
// Throws IoError when the path cannot be written.
void WriteManifest(const std::string& path, const RunManifest& m);
RunManifest ReadManifest(const std::string& path);

}  // namespace rsbench
