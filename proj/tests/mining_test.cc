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

#include "mining.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "error.h"
#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"

namespace sfns {
namespace {

using ::sfns::testing::TempDir;

BehaviorLog Log(const std::vector<std::pair<std::string, std::string>>& edges) {
  std::vector<LogRecord> records;
  for (const auto& [q, e] : edges) records.push_back({q, e, 5, "2026-01-01"});
  return BehaviorLog(std::move(records));
}

TEST(BehaviorLogTest, NormalizesFiltersAndValidates) {
  const BehaviorLog log({{"Taylor  Swift", "e1", 3, ""}, {"taylor swift", "e2", 1, ""},
                         {"pink", "e3", 1, ""}},
                        2);
  EXPECT_EQ(log.Queries(), (std::vector<std::string>{"taylor swift"}));
  EXPECT_EQ(log.EntitiesOf("taylor swift"), (std::set<std::string>{"e1"}));
  EXPECT_TRUE(log.EntitiesOf("pink").empty());
  EXPECT_THROW(BehaviorLog({{"q", "e", 0, ""}}), Error);
  EXPECT_THROW(BehaviorLog({{"  ", "e", 1, ""}}), Error);
  EXPECT_THROW(BehaviorLog({{"q", "", 1, ""}}), Error);
}

TEST(BehaviorLogTest, EngagementShares) {
  const BehaviorLog log({{"q", "a", 3, ""}, {"q", "b", 1, ""}, {"q", "a", 4, ""}});
  const auto shares = log.EngagementShares("q");
  EXPECT_DOUBLE_EQ(shares.at("a"), 7.0 / 8.0);
  EXPECT_DOUBLE_EQ(shares.at("b"), 1.0 / 8.0);
  EXPECT_TRUE(log.EngagementShares("missing").empty());
}

TEST(BehaviorLogTest, LoadsJsonl) {
  TempDir dir;
  const std::string path = dir.File("log.jsonl");
  std::ofstream(path) << "{\"q\":\"Tayler Swift\",\"e\":\"e1\",\"n\":4,\"day\":\"2026-01-02\"}\n"
                      << "\n"
                      << "{\"q\":\"taylor swift\",\"e\":\"e1\"}\n";
  const BehaviorLog log = LoadBehaviorLog(path);
  ASSERT_EQ(log.records().size(), 2u);
  EXPECT_EQ(log.records()[0].query, "tayler swift");
  EXPECT_EQ(log.records()[1].engagements, 1);
  EXPECT_EQ(LoadBehaviorLog(path, 2).records().size(), 1u);

  std::ofstream(path) << "{\"q\":\"a\",\"e\":\"e1\"}\n{\"q\":\"b\"}\n";
  try {
    LoadBehaviorLog(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos);
  }
}

TEST(LevenshteinTest, Examples) {
  EXPECT_EQ(Levenshtein("tayler", "taylor"), 1u);
  EXPECT_EQ(Levenshtein("sonideroaczino", "sonidero aczino"), 1u);
  EXPECT_EQ(Levenshtein("", "abc"), 3u);
  EXPECT_EQ(Levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(Levenshtein("caf\xC3\xA9", "cafe"), 1u);  // one scalar value, two bytes
}

TEST(ThresholdTest, Table) {
  for (size_t len = 1; len <= 19; ++len) EXPECT_EQ(DistanceThreshold(len), 1u) << len;
  for (size_t len = 20; len <= 29; ++len) EXPECT_EQ(DistanceThreshold(len), 2u) << len;
  EXPECT_EQ(DistanceThreshold(0), 1u);
  EXPECT_EQ(DistanceThreshold(30), 3u);
}

TEST(LexicallyCloseTest, WorkedExamples) {
  EXPECT_TRUE(LexicallyClose("tayler swift", "taylor swift"));
  EXPECT_FALSE(LexicallyClose("taylor swift", "taylor swift songs"));  // 12/18 < 0.8
  EXPECT_TRUE(LexicallyClose("sonideroaczino", "sonidero aczino"));
  EXPECT_TRUE(LexicallyClose("radha kawach", "radha kavach"));
  EXPECT_FALSE(LexicallyClose("abcd", "abef"));  // distance 2 > 1
  EXPECT_TRUE(LexicallyClose("abcd", "abce"));
  // Ratio exactly 0.8 passes: 4 vs 5 characters, one insertion.
  EXPECT_TRUE(LexicallyClose("abcd", "abcde"));
  EXPECT_FALSE(LexicallyClose("abc", "abcd"));  // 0.75
}

TEST(LexicallyCloseTest, Symmetric) {
  std::mt19937_64 rng(6);
  const std::string letters = "ab c";
  for (int i = 0; i < 20000; ++i) {
    std::string a, b;
    for (size_t k = 0, n = rng() % 12; k < n; ++k) a += letters[rng() % 4];
    for (size_t k = 0, n = rng() % 12; k < n; ++k) b += letters[rng() % 4];
    ASSERT_EQ(LexicallyClose(a, b), LexicallyClose(b, a)) << a << "|" << b;
  }
}

TEST(MinePairsTest, Examples) {
  const BehaviorLog log = Log({{"tayler swift", "ts"}, {"taylor swift", "ts"},
                               {"taylor swift songs", "ts"}, {"radha kawach", "rk"},
                               {"radha kavach", "rk"}, {"sonideroaczino", "sa"},
                               {"sonidero aczino", "sa"}, {"taylor swiff", "other"}});
  const auto pairs = MinePositivePairs(log);
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& p : pairs) {
    got.insert({p.q, p.q_pos});
    EXPECT_FALSE(p.shared_entities.empty());
  }
  const std::set<std::pair<std::string, std::string>> want = {
      {"tayler swift", "taylor swift"}, {"taylor swift", "tayler swift"},
      {"radha kawach", "radha kavach"}, {"radha kavach", "radha kawach"},
      {"sonideroaczino", "sonidero aczino"}, {"sonidero aczino", "sonideroaczino"}};
  EXPECT_EQ(got, want);
  EXPECT_EQ(pairs.size(), 6u);
}

TEST(MinePairsTest, MatchesAllPairsReference) {
  std::mt19937_64 rng(8);
  const std::vector<std::string> pool = {"abcde", "abcdf", "abxde", "bcde", "abcdef",
                                         "zzzzz", "zzzzy", "abcd e", "abc de", "q"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 15); i < n; ++i) {
      edges.push_back({pool[rng() % pool.size()], "e" + std::to_string(rng() % 4)});
    }
    const BehaviorLog log = Log(edges);
    std::set<std::tuple<std::string, std::string, std::vector<std::string>>> want;
    const auto qs = log.Queries();
    for (const auto& a : qs) {
      for (const auto& b : qs) {
        if (a == b || !LexicallyClose(a, b)) continue;
        std::vector<std::string> shared;
        std::set_intersection(log.EntitiesOf(a).begin(), log.EntitiesOf(a).end(),
                              log.EntitiesOf(b).begin(), log.EntitiesOf(b).end(),
                              std::back_inserter(shared));
        if (!shared.empty()) want.insert({a, b, shared});
      }
    }
    std::set<std::tuple<std::string, std::string, std::vector<std::string>>> got;
    for (const auto& p : MinePositivePairs(log)) got.insert({p.q, p.q_pos, p.shared_entities});
    ASSERT_EQ(got, want) << "trial " << trial;
  }
}

TEST(MineNegativesTest, FiltersEntitySharingCandidates) {
  const BehaviorLog log = Log({{"q", "e1"}, {"qpos", "e1"}, {"x", "e1"}, {"y", "e2"}, {"z", "e3"}});
  const std::vector<MinedPair> pairs = {{"q", "qpos", {"e1"}}};
  CandidateSource source = [](std::string_view) {
    return std::vector<std::string>{"qpos", "x", "y", "Y", "q", "z"};
  };
  const auto r = MineHardNegatives(pairs, source, log, 4);
  ASSERT_EQ(r.triples.size(), 1u);
  EXPECT_EQ(r.triples[0].negatives, (std::vector<std::string>{"y", "z"}));
  EXPECT_EQ(r.starved, 1u);
  const auto two = MineHardNegatives(pairs, source, log, 2);
  EXPECT_EQ(two.triples[0].negatives, (std::vector<std::string>{"y", "z"}));
  EXPECT_EQ(two.starved, 0u);
}

TEST(MineNegativesTest, ZeroNegatives) {
  const BehaviorLog log = Log({{"q", "e1"}, {"qpos", "e1"}, {"y", "e2"}});
  const std::vector<MinedPair> pairs = {{"q", "qpos", {"e1"}}, {"qpos", "q", {"e1"}}};
  bool called = false;
  CandidateSource source = [&](std::string_view) {
    called = true;
    return std::vector<std::string>{"y"};
  };
  const auto r = MineHardNegatives(pairs, source, log, 0);
  ASSERT_EQ(r.triples.size(), 2u);
  for (const auto& t : r.triples) EXPECT_TRUE(t.negatives.empty());
  EXPECT_EQ(r.starved, 0u);
  EXPECT_FALSE(called);
}

TEST(MineNegativesTest, StarvationCounter) {
  // Three queries, one entity: every candidate shares it.
  const BehaviorLog log = Log({{"aa", "e"}, {"ab", "e"}, {"ac", "e"}});
  const auto pairs = MinePositivePairs(log);
  ASSERT_FALSE(pairs.empty());
  CandidateSource source = [&](std::string_view) { return log.Queries(); };
  const auto r = MineHardNegatives(pairs, source, log, 2);
  EXPECT_EQ(r.starved, pairs.size());
  for (const auto& t : r.triples) EXPECT_TRUE(t.negatives.empty());
}

TEST(MineNegativesTest, ErrorsCarryPairContext) {
  const BehaviorLog log = Log({{"q", "e1"}, {"qpos", "e1"}});
  const std::vector<MinedPair> pairs = {{"q", "qpos", {"e1"}}};
  CandidateSource source = [](std::string_view) -> std::vector<std::string> {
    throw IoError("index unavailable");
  };
  try {
    MineHardNegatives(pairs, source, log, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("'q', 'qpos'"), std::string::npos) << e.what();
  }
}

TEST(MineNegativesTest, NegativesNeverShareEntities) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < 40; ++i) {
      edges.push_back({"q" + std::to_string(rng() % 20), "e" + std::to_string(rng() % 10)});
    }
    const BehaviorLog log = Log(edges);
    const auto queries = log.Queries();
    std::vector<MinedPair> pairs;
    for (size_t i = 0; i + 1 < queries.size(); i += 2) pairs.push_back({queries[i], queries[i + 1], {"x"}});
    CandidateSource source = [&](std::string_view) {
      auto c = queries;
      std::shuffle(c.begin(), c.end(), rng);
      return c;
    };
    for (const auto& t : MineHardNegatives(pairs, source, log, 3).triples) {
      for (const auto& n : t.negatives) {
        for (const auto& e : log.EntitiesOf(n)) EXPECT_EQ(log.EntitiesOf(t.q).count(e), 0u);
      }
    }
  }
}

TEST(SplitTest, ThreeEdgeExample) {
  const BehaviorLog log = Log({{"q1", "e1"}, {"q2", "e1"}, {"q3", "e2"}});
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const SplitResult s = SplitByComponents(log, 0.2, seed);
    EXPECT_EQ(s.component_count, 2u);
    const auto& with_q1 = std::count(s.test_queries.begin(), s.test_queries.end(), "q1")
                              ? s.test_queries : s.train_queries;
    EXPECT_TRUE(std::count(with_q1.begin(), with_q1.end(), "q2"));
    const auto& ents = &with_q1 == &s.test_queries ? s.test_entities : s.train_entities;
    EXPECT_EQ(ents, (std::vector<std::string>{"e1"}));
    EXPECT_FALSE(s.train_queries.empty());
    EXPECT_FALSE(s.test_queries.empty());
  }
}

TEST(SplitTest, SingleComponentIsInfeasible) {
  const BehaviorLog log = Log({{"a", "e"}, {"b", "e"}, {"c", "e"}, {"d", "e"}});
  try {
    SplitByComponents(log, 0.2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("4 of 4"), std::string::npos) << e.what();
  }
  EXPECT_THROW(SplitByComponents(log, 0.0, 1), Error);
  EXPECT_THROW(SplitByComponents(BehaviorLog(), 0.2, 1), Error);
}

TEST(SplitTest, RandomLogsNeverLeak) {
  std::mt19937_64 rng(1000);
  int split = 0, infeasible = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t nq = 5 + rng() % 60;
    const size_t ne = nq + rng() % nq;
    std::vector<std::pair<std::string, std::string>> edges;
    for (size_t i = 0; i < nq; ++i) {
      for (size_t d = 0, deg = 1 + (rng() % 4 == 0); d <= deg - 1; ++d) {
        edges.push_back({"q" + std::to_string(i), "e" + std::to_string(rng() % ne)});
      }
    }
    const BehaviorLog log = Log(edges);
    const double frac = 0.1 + 0.05 * static_cast<double>(rng() % 7);
    const auto sizes = oracles::ComponentSizes(log);
    const size_t largest = *std::max_element(sizes.begin(), sizes.end());
    const bool feasible = static_cast<double>(largest) / nq <= 1.0 - frac;
    if (!feasible) {
      EXPECT_THROW(SplitByComponents(log, frac, trial), Error);
      ++infeasible;
      continue;
    }
    const SplitResult s = SplitByComponents(log, frac, trial);
    ++split;
    EXPECT_EQ(s.component_count, sizes.size());
    std::set<std::string> tq(s.test_queries.begin(), s.test_queries.end());
    std::set<std::string> te(s.test_entities.begin(), s.test_entities.end());
    for (const auto& q : s.train_queries) ASSERT_EQ(tq.count(q), 0u);
    for (const auto& e : s.train_entities) ASSERT_EQ(te.count(e), 0u);
    // Every edge stays on one side.
    for (const auto& r : log.records()) {
      ASSERT_EQ(tq.count(r.query) > 0, te.count(r.entity) > 0);
    }
    EXPECT_EQ(s.train_queries.size() + s.test_queries.size(), nq);
    EXPECT_GE(static_cast<double>(s.test_queries.size()), frac * nq);
    EXPECT_FALSE(s.train_queries.empty());
  }
  EXPECT_GT(split, 500);
  RecordProperty("infeasible", infeasible);
}

TEST(SplitTest, SeedDeterminism) {
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < 50; ++i) edges.push_back({"q" + std::to_string(i), "e" + std::to_string(i / 2)});
  const BehaviorLog log = Log(edges);
  const SplitResult a = SplitByComponents(log, 0.3, 5);
  const SplitResult b = SplitByComponents(log, 0.3, 5);
  EXPECT_EQ(a.test_queries, b.test_queries);
  EXPECT_EQ(a.test_components, b.test_components);
}

}  // namespace
}  // namespace sfns
