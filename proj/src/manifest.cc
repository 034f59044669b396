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

#include "rsbench/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "rsbench/error.hpp"

namespace rsbench {

std::string Sha256Hex(std::span<const unsigned char> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int k = 0; k < length; ++k) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  }
  return hex.str();
}

std::string MatrixFingerprint(const CsrMatrix& m) {
  std::ostringstream buffer(std::ios::binary);
  WriteMatrix(buffer, m);
  const std::string bytes = buffer.str();
  return Sha256Hex({reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()});
}

std::string FileFingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Sha256Hex({reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()});
}

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream s;
  s << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

nlohmann::json ManifestToJson(const RunManifest& m) {
  return {{"command", m.command},
          {"config", m.config},
          {"seeds", m.seeds},
          {"dataset_fingerprint", m.dataset_fingerprint},
          {"versions", m.versions},
          {"started_at", m.started_at},
          {"finished_at", m.finished_at}};
}

RunManifest ManifestFromJson(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::vector<std::string>>();
  m.config = j.at("config");
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
  m.versions = j.at("versions");
  m.started_at = j.at("started_at").get<std::string>();
  m.finished_at = j.at("finished_at").get<std::string>();
  return m;
}

void WriteManifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << ManifestToJson(m).dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest: " + path);
}

RunManifest ReadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  try {
    return ManifestFromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path + ": " + e.what());
  }
}

}  // namespace rsbench
