// Copyright 2026 The sfns Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "index.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "error.h"
#include "gtest/gtest.h"
#include "oracles.h"
#include "io.h"
#include "sparse.h"
#include "test_util.h"

namespace sfns {
namespace {

using ::sfns::testing::TempDir;

SparseVector Vec(std::vector<SparseEntry> e) { return SparseVector(std::move(e)); }

std::vector<DocInput> RandomDocs(std::mt19937_64& rng, size_t n, TokenId vocab) {
  std::vector<DocInput> docs;
  for (size_t i = 0; i < n; ++i) {
    docs.push_back({"d" + std::to_string(i), "text " + std::to_string(i),
                    oracles::RandomSparse(rng, vocab, 12), i % 3 == 0 ? "e" + std::to_string(i % 7) : ""});
  }
  return docs;
}

TEST(IndexBuildTest, TwoDocExample) {
  const std::vector<DocInput> docs = {{"d1", "", Vec({{0, 1.0}}), ""},
                                      {"d2", "", Vec({{0, 0.5}, {1, 2.0}}), ""}};
  const InvertedIndex index = InvertedIndex::Build(docs);
  EXPECT_EQ(index.postings().at(0).size(), 2u);
  EXPECT_EQ(index.postings().at(1).size(), 1u);
  EXPECT_EQ(index.stats().doc_count(), 2u);
  EXPECT_EQ(index.stats().DocFreq(0), 2u);
  EXPECT_EQ(index.stats().DocFreq(1), 1u);
  EXPECT_DOUBLE_EQ(index.AverageNonZeroDims(), 1.5);
}

TEST(IndexBuildTest, EmptyIndex) {
  const InvertedIndex index = InvertedIndex::Build({});
  EXPECT_EQ(index.doc_count(), 0u);
  EXPECT_TRUE(index.Search(Vec({{0, 1.0}}), 10).empty());
  EXPECT_EQ(index.AverageNonZeroDims(), 0.0);
}

TEST(IndexBuildTest, DuplicateIdNamesTheId) {
  const std::vector<DocInput> docs = {{"dup", "", Vec({{0, 1.0}}), ""},
                                      {"dup", "", Vec({{1, 1.0}}), ""}};
  try {
    InvertedIndex::Build(docs);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("dup"), std::string::npos);
  }
}

TEST(IndexBuildTest, DocFreqMatchesRecount) {
  std::mt19937_64 rng(1);
  const auto docs = RandomDocs(rng, 1000, 300);
  const InvertedIndex index = InvertedIndex::Build(docs);
  std::map<TokenId, uint64_t> df;
  for (const auto& d : docs) {
    for (const auto& e : d.vector.entries()) ++df[e.token];
  }
  EXPECT_EQ(index.stats().doc_count(), 1000u);
  EXPECT_EQ(index.stats().doc_freq(), df);
  for (const auto& [t, list] : index.postings()) {
    EXPECT_EQ(list.size(), index.stats().DocFreq(t));
    for (size_t i = 1; i < list.size(); ++i) EXPECT_LT(list[i - 1].doc, list[i].doc);
  }
}

TEST(IndexSearchTest, Examples) {
  const std::vector<DocInput> docs = {{"d1", "", Vec({{0, 1.0}}), ""},
                                      {"d2", "", Vec({{0, 3.0}}), ""}};
  const InvertedIndex index = InvertedIndex::Build(docs);
  const auto hits = index.Search(Vec({{0, 2.0}}), 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0], (SearchHit{1, 6.0, 1}));
  EXPECT_EQ(hits[1], (SearchHit{0, 2.0, 2}));
  EXPECT_TRUE(index.Search(Vec({{5, 1.0}}), 2).empty());
  EXPECT_TRUE(index.Search(Vec({}), 2).empty());
  EXPECT_THROW(index.Search(Vec({{0, 1.0}}), 0), Error);
}

TEST(IndexSearchTest, TiesGoToSmallerDocId) {
  const std::vector<DocInput> docs = {{"a", "", Vec({{0, 1.0}}), ""},
                                      {"b", "", Vec({{0, 1.0}}), ""},
                                      {"c", "", Vec({{0, 1.0}}), ""}};
  const auto hits = InvertedIndex::Build(docs).Search(Vec({{0, 1.0}}), 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].doc, 0u);
  EXPECT_EQ(hits[1].doc, 1u);
}

TEST(IndexSearchTest, MatchesBruteForce) {
  std::mt19937_64 rng(77);
  const auto docs = RandomDocs(rng, 1000, 200);
  const InvertedIndex index = InvertedIndex::Build(docs);
  for (int q = 0; q < 100; ++q) {
    const SparseVector query = oracles::RandomSparse(rng, 200, 8);
    for (size_t k : {1u, 10u, 25u, 1000u}) {
      const auto got = index.Search(query, k);
      ASSERT_EQ(got, oracles::BruteForceSearch(docs, query, k)) << "query " << q << " k " << k;
      for (const auto& h : got) EXPECT_GT(h.score, 0.0);
    }
  }
}

TEST(IndexFileTest, RoundTripIsBitExact) {
  TempDir dir;
  std::mt19937_64 rng(4);
  const auto docs = RandomDocs(rng, 200, 100);
  const InvertedIndex index = InvertedIndex::Build(docs);
  const std::string path = dir.File("idx.bin");
  SaveIndex(index, path);
  const InvertedIndex loaded = LoadIndex(path);
  EXPECT_EQ(loaded, index);
  EXPECT_EQ(SerializeIndex(loaded), SerializeIndex(index));
  const auto bytes = SerializeIndex(index);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SFNS");
}

TEST(IndexFileTest, EmptyIndexRoundTrips) {
  const InvertedIndex empty = InvertedIndex::Build({});
  const InvertedIndex loaded = DeserializeIndex(SerializeIndex(empty));
  EXPECT_EQ(loaded, empty);
  EXPECT_EQ(loaded.doc_count(), 0u);
}

ErrorCode LoadError(std::vector<uint8_t> bytes) {
  try {
    DeserializeIndex(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;  // no error: never expected here
}

TEST(IndexFileTest, CorruptionIsDetected) {
  std::mt19937_64 rng(8);
  const auto docs = RandomDocs(rng, 20, 30);
  const auto good = SerializeIndex(InvertedIndex::Build(docs));

  auto flipped = good;
  flipped[good.size() / 2] ^= 0x01;
  EXPECT_EQ(LoadError(flipped), ErrorCode::kChecksum);

  auto bad_crc = good;
  bad_crc.back() ^= 0xFF;
  EXPECT_EQ(LoadError(bad_crc), ErrorCode::kChecksum);

  auto version = good;
  version[4] = 2;
  EXPECT_EQ(LoadError(version), ErrorCode::kVersion);

  auto magic = good;
  magic[0] = 'X';
  EXPECT_EQ(LoadError(magic), ErrorCode::kFormat);

  for (size_t cut : {size_t{0}, size_t{3}, size_t{10}, good.size() / 2, good.size() - 1}) {
    EXPECT_EQ(LoadError({good.begin(), good.begin() + cut}), ErrorCode::kTruncated) << cut;
  }
}

TEST(IndexFileTest, MissingFileIsIoError) {
  try {
    LoadIndex("/nonexistent/dir/idx.bin");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace sfns
