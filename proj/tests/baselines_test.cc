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

#include "baselines.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "error.h"
#include "gtest/gtest.h"
#include "text.h"

namespace sfns {
namespace {

// Plain O(nm) edit distance, no band.
size_t FullLevenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<size_t>> d(a.size() + 1, std::vector<size_t>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

std::vector<TextDoc> Docs(const std::vector<std::string>& texts) {
  std::vector<TextDoc> docs;
  for (size_t i = 0; i < texts.size(); ++i) docs.push_back({"d" + std::to_string(i), texts[i], ""});
  return docs;
}

TEST(TrigramRetrieverTest, ExactNameTiesWithItsExtension) {
  // Documents store 1.0 per distinct trigram, so a document that contains
  // every query trigram scores the same however long it is. The exact name
  // wins only through the doc-id tie-break.
  const auto docs = Docs({"tayler swift", "tayler swift & post malone", "taylor swift", "post malone"});
  const TrigramRetriever r(docs);
  const auto hits = r.Search("tayler swift", 10);
  ASSERT_GE(hits.size(), 3u);
  EXPECT_EQ(hits[0].doc, 0u);
  EXPECT_EQ(hits[1].doc, 1u);
  EXPECT_DOUBLE_EQ(hits[0].score, hits[1].score);
  EXPECT_GT(hits[1].score, hits[2].score);
  EXPECT_DOUBLE_EQ(hits[0].score, r.SelfScore("tayler swift"));
}

TEST(TrigramRetrieverTest, ShortWordsAreInvisible) {
  const TrigramRetriever r(Docs({"me", "me and you", "call me maybe"}));
  EXPECT_TRUE(r.Search("me", 10).empty());
  EXPECT_TRUE(r.EncodeQuery("me").empty());
  EXPECT_EQ(r.SelfScore("me"), 0.0);
}

TEST(TrigramRetrieverTest, WordOrderInvariant) {
  const TrigramRetriever r(Docs({"sabrina carpenter", "carpenter brothers", "sabrina the witch"}));
  EXPECT_EQ(r.Search("carpenter sabrina", 10), r.Search("sabrina carpenter", 10));
  EXPECT_EQ(r.EncodeQuery("carpenter sabrina"), r.EncodeQuery("sabrina carpenter"));
}

TEST(TrigramRetrieverTest, SelfMatchDominates) {
  std::mt19937_64 rng(21);
  const std::string letters = "abcdefg";
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> texts;
    for (int i = 0; i < 60; ++i) {
      std::string t;
      const int words = 1 + static_cast<int>(rng() % 3);
      for (int w = 0; w < words; ++w) {
        if (w) t += ' ';
        const int len = 3 + static_cast<int>(rng() % 5);
        for (int c = 0; c < len; ++c) t += letters[rng() % letters.size()];
      }
      texts.push_back(t);
    }
    const TrigramRetriever r(Docs(texts));
    for (size_t i = 0; i < texts.size(); i += 5) {
      const auto hits = r.Search(texts[i], texts.size());
      ASSERT_FALSE(hits.empty());
      double own = -1.0;
      for (const auto& h : hits) {
        if (h.doc == i) own = h.score;
      }
      EXPECT_EQ(own, hits[0].score) << texts[i];
      EXPECT_NEAR(own, r.SelfScore(texts[i]), 1e-12);
    }
  }
}

TEST(BoundedLevenshteinTest, Examples) {
  EXPECT_EQ(BoundedLevenshtein(U"tayler", U"taylor", 1), 1u);
  EXPECT_EQ(BoundedLevenshtein(U"abc", U"abc", 1), 0u);
  EXPECT_EQ(BoundedLevenshtein(U"ab", U"abcd", 1), 2u);  // length gap alone
  EXPECT_EQ(BoundedLevenshtein(U"ab", U"abcd", 2), 2u);
  EXPECT_EQ(BoundedLevenshtein(U"", U"a", 1), 1u);
  EXPECT_EQ(BoundedLevenshtein(U"kitten", U"sitting", 2), 3u);
}

TEST(BoundedLevenshteinTest, AgreesWithUnbandedDp) {
  std::mt19937_64 rng(13);
  const std::u32string letters = U"abcd";
  for (int trial = 0; trial < 20000; ++trial) {
    std::u32string a, b;
    const size_t la = rng() % 9, lb = rng() % 9;
    for (size_t i = 0; i < la; ++i) a += letters[rng() % 4];
    for (size_t i = 0; i < lb; ++i) b += letters[rng() % 4];
    for (size_t max : {1u, 2u}) {
      const size_t full = FullLevenshtein(a, b);
      ASSERT_EQ(BoundedLevenshtein(a, b, max), std::min(full, max + 1))
          << ToUtf8(a) << " / " << ToUtf8(b) << " max " << max;
    }
  }
}

TEST(FuzzyRetrieverTest, MisspellingScoresNearMaximum) {
  const auto docs = Docs({"taylor swift", "taylor made", "swift river", "post malone"});
  const FuzzyRetriever r(docs, {});
  const auto hits = r.Search("tayler swift", 10);
  ASSERT_FALSE(hits.empty());
  EXPECT_EQ(hits[0].doc, 0u);
  EXPECT_GE(hits[0].score / r.SelfScore("tayler swift"), 5.0 / 6.0);
}

TEST(FuzzyRetrieverTest, WordOrderInvariant) {
  const auto docs = Docs({"sabrina carpenter", "carpenter brothers", "sabrina"});
  const FuzzyRetriever r(docs, {});
  EXPECT_EQ(r.Search("carpenter sabrina", 10), r.Search("sabrina carpenter", 10));
}

TEST(FuzzyRetrieverTest, LengthGapContributesNothing) {
  const FuzzyRetriever r(Docs({"abcd"}), {});
  EXPECT_TRUE(r.Search("ab", 10).empty());
  EXPECT_TRUE(r.Search("abx", 10).empty());
  // Two edits on a two-letter word leave no closeness.
  const FuzzyRetriever two(Docs({"abcd"}), {2, 0});
  EXPECT_TRUE(two.Search("ab", 10).empty());
  EXPECT_EQ(two.Search("abx", 10).size(), 1u);
}

TEST(FuzzyRetrieverTest, NeverMatchesBeyondBudget) {
  std::mt19937_64 rng(31);
  const std::u32string letters = U"abc";
  for (int trial = 0; trial < 300; ++trial) {
    std::u32string q, d;
    for (size_t i = 0, n = 2 + rng() % 5; i < n; ++i) q += letters[rng() % 3];
    for (size_t i = 0, n = 2 + rng() % 5; i < n; ++i) d += letters[rng() % 3];
    for (int max : {1, 2}) {
      const FuzzyRetriever r(Docs({ToUtf8(d)}), {max, 0});
      const bool hit = !r.Search(ToUtf8(q), 1).empty();
      const size_t dist = FullLevenshtein(q, d);
      EXPECT_EQ(hit, dist <= static_cast<size_t>(max) && dist < q.size())
          << ToUtf8(q) << " / " << ToUtf8(d);
    }
  }
}

TEST(FuzzyRetrieverTest, PrefixLock) {
  const auto docs = Docs({"hello"});
  EXPECT_EQ(FuzzyRetriever(docs, {1, 0}).Search("bello", 5).size(), 1u);
  EXPECT_TRUE(FuzzyRetriever(docs, {1, 1}).Search("bello", 5).empty());
  EXPECT_EQ(FuzzyRetriever(docs, {1, 3}).Search("helo", 5).size(), 1u);
}

TEST(FuzzyRetrieverTest, ConfigValidation) {
  EXPECT_THROW((FuzzyConfig{0, 0}).Validate(), Error);
  EXPECT_THROW((FuzzyConfig{3, 0}).Validate(), Error);
  EXPECT_THROW((FuzzyConfig{1, 5}).Validate(), Error);
  EXPECT_THROW((FuzzyConfig{1, -1}).Validate(), Error);
  EXPECT_NO_THROW((FuzzyConfig{2, 4}).Validate());
  EXPECT_THROW(FuzzyRetriever(Docs({"a"}), FuzzyConfig{5, 0}), Error);
}

TEST(FuzzyRetrieverTest, WordWeightIsSmoothedIdf) {
  const FuzzyRetriever r(Docs({"a b", "a c", "d"}), {});
  EXPECT_DOUBLE_EQ(r.WordWeight(U"a"), std::log(4.0 / 3.0) + 1.0);
  EXPECT_DOUBLE_EQ(r.WordWeight(U"zzz"), std::log(4.0) + 1.0);
}

}  // namespace
}  // namespace sfns
