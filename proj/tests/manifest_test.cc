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

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "rsbench/error.hpp"
#include "rsbench/manifest.hpp"
#include "test_util.hpp"

namespace rsbench {
namespace {

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(Sha256Hex({}), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const std::string abc = "abc";
  EXPECT_EQ(Sha256Hex({reinterpret_cast<const unsigned char*>(abc.data()), abc.size()}),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Fingerprint, TracksContent) {
  std::mt19937_64 gen(1);
  const CsrMatrix a = testing::RandomMatrix(gen, 10, 10, 0.3);
  CsrMatrix b = a;
  EXPECT_EQ(MatrixFingerprint(a), MatrixFingerprint(b));
  const CsrMatrix c = testing::RandomMatrix(gen, 10, 10, 0.3);
  EXPECT_NE(MatrixFingerprint(a), MatrixFingerprint(c));
  EXPECT_NE(MatrixFingerprint(CsrMatrix(3, 4)), MatrixFingerprint(CsrMatrix(4, 3)));

  const auto dir = testing::TempDir("manifest_fp");
  const std::string path = dir + "/f.txt";
  std::ofstream(path) << "one";
  const std::string first = FileFingerprint(path);
  std::ofstream(path) << "two";
  EXPECT_NE(first, FileFingerprint(path));
  EXPECT_THROW(FileFingerprint(dir + "/missing"), IoError);
}

RunManifest Sample() {
  RunManifest m;
  m.command = {"train", "--model", "ease-r"};
  m.config = {{"lambda", 0.5}};
  m.seeds = {1, 2, 3};
  m.dataset_fingerprint = "abc";
  m.versions = {{"rsbench", kVersion}};
  m.started_at = "2020-01-01T00:00:00Z";
  m.finished_at = "2020-01-01T00:00:01Z";
  return m;
}

TEST(Manifest, JsonAndFileRoundTrip) {
  const RunManifest m = Sample();
  EXPECT_EQ(ManifestFromJson(ManifestToJson(m)), m);
  const std::string path = testing::TempDir("manifest_rt") + "/manifest.json";
  WriteManifest(path, m);
  EXPECT_EQ(ReadManifest(path), m);
  EXPECT_THROW(ReadManifest(path + ".missing"), IoError);
}

TEST(Manifest, RepeatRunsDifferOnlyInTimestamps) {
  RunManifest a = Sample();
  RunManifest b = Sample();
  a.started_at = UtcTimestamp();
  b.started_at = "1999-12-31T23:59:59Z";
  auto ja = ManifestToJson(a), jb = ManifestToJson(b);
  EXPECT_NE(ja, jb);
  ja.erase("started_at");
  ja.erase("finished_at");
  jb.erase("started_at");
  jb.erase("finished_at");
  EXPECT_EQ(ja, jb);
}

TEST(Manifest, TimestampShape) {
  const std::string t = UtcTimestamp();
  ASSERT_EQ(t.size(), 20u) << t;
  EXPECT_EQ(t[4], '-');
  EXPECT_EQ(t[10], 'T');
  EXPECT_EQ(t.back(), 'Z');
}

}  // namespace
}  // namespace rsbench
