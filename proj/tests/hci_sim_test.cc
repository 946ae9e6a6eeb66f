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

#include "hci_sim.h"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "baselines.h"
#include "error.h"
#include "gtest/gtest.h"
#include "synth.h"
#include "test_util.h"

namespace sfns {
namespace {

TEST(HciScoreTest, WorkedExample) {
  const std::map<std::string, double> exact = {{"e1", 0.5}, {"e2", 0.5}};
  const std::map<std::string, double> near = {{"e1", 0.2}, {"e3", 0.8}};
  const std::vector<ChannelCandidate> c = {{&exact, 1.0}, {&near, 0.5}};
  const auto scored = HciScore(c);
  ASSERT_EQ(scored.size(), 3u);
  EXPECT_EQ(scored[0].entity, "e1");
  EXPECT_NEAR(scored[0].score, 0.6, 1e-12);
  EXPECT_EQ(scored[1].entity, "e2");
  EXPECT_EQ(scored[2].entity, "e3");
  EXPECT_NEAR(scored[2].score, 0.4, 1e-12);
}

TEST(HciScoreTest, ExactMatchOutranksWeakNeighbours) {
  const std::map<std::string, double> exact = {{"e1", 1.0}};
  const std::map<std::string, double> other = {{"e2", 1.0}};
  const std::vector<ChannelCandidate> c = {
      {&other, 0.3}, {&exact, 1.0}, {&other, 0.3}, {&other, 0.3}};
  const auto scored = HciScore(c);
  ASSERT_EQ(scored.size(), 2u);
  EXPECT_EQ(scored[0].entity, "e1");
}

TEST(HciScoreTest, EmptyAndZero) {
  EXPECT_TRUE(HciScore({}).empty());
  const std::map<std::string, double> s = {{"e1", 1.0}};
  const std::vector<ChannelCandidate> c = {{&s, 0.0}, {nullptr, 1.0}};
  EXPECT_TRUE(HciScore(c).empty());
}

TEST(WriteBackTest, AddsOnceAndKeepsFirstShare) {
  size_t added = 99;
  const std::vector<Validated> v = {{"q", "e1", 0.7}, {"q", "e2", 0.3}};
  const EpochState s1 = WriteBack({}, v, &added);
  EXPECT_EQ(added, 2u);
  EXPECT_EQ(s1.entries.at("q").entity_scores.at("e1"), 0.7);
  const EpochState s2 = WriteBack(s1, v, &added);
  EXPECT_EQ(added, 0u);
  EXPECT_EQ(s2, s1);
  const EpochState s3 = WriteBack(s1, {}, &added);
  EXPECT_EQ(added, 0u);
  EXPECT_EQ(s3, s1);
  const std::vector<Validated> bad = {{"q", "e", 1.5}};
  EXPECT_SFNS_ERROR(WriteBack({}, bad), kValidation);
}

// Retriever driven by a callback over the snapshot documents.
class FnRetriever : public Retriever {
 public:
  using Fn = std::function<std::vector<SearchHit>(std::span<const DocEntry>,
                                                  std::string_view, size_t)>;
  FnRetriever(std::span<const TextDoc> docs, Fn fn) : fn_(std::move(fn)) {
    for (const TextDoc& d : docs) docs_.push_back({d.id, d.text, d.payload});
  }
  std::vector<SearchHit> Search(std::string_view q, size_t k) const override {
    return fn_(docs_, q, k);
  }
  double SelfScore(std::string_view) const override { return 1.0; }
  std::span<const DocEntry> docs() const override { return docs_; }

 private:
  std::vector<DocEntry> docs_;
  Fn fn_;
};

ChannelFactory Never() {
  return [](std::span<const TextDoc> docs) -> std::unique_ptr<Retriever> {
    return std::make_unique<FnRetriever>(
        docs, [](std::span<const DocEntry>, std::string_view, size_t) {
          return std::vector<SearchHit>{};
        });
  };
}

// Returns the catalog document of each true entity at similarity 1.
ChannelFactory Oracle(std::map<std::string, std::set<std::string>> truth) {
  return [truth](std::span<const TextDoc> docs) -> std::unique_ptr<Retriever> {
    return std::make_unique<FnRetriever>(
        docs, [truth](std::span<const DocEntry> d, std::string_view q, size_t k) {
          std::vector<SearchHit> hits;
          auto it = truth.find(std::string(q));
          if (it == truth.end()) return hits;
          for (DocId i = 0; i < d.size() && hits.size() < k; ++i) {
            if (it->second.count(d[i].payload)) {
              hits.push_back({i, 1.0, static_cast<uint32_t>(hits.size() + 1)});
            }
          }
          return hits;
        });
  };
}

struct Toy {
  BehaviorLog log;
  std::vector<CatalogEntry> catalog;
  std::map<std::string, std::set<std::string>> truth;
};

Toy MakeToy() {
  Toy t;
  std::vector<LogRecord> records;
  for (int i = 0; i < 12; ++i) {
    const std::string e = "e" + std::to_string(i);
    t.catalog.push_back({e, "name " + std::to_string(i)});
    const std::string q = "query " + std::to_string(i);
    records.push_back({q, e, 5, "2026-01-0" + std::to_string(1 + i % 3)});
    t.truth[q].insert(e);
    // Below the engagement threshold: not ground truth.
    records.push_back({q, "e" + std::to_string((i + 1) % 12), 1, "2026-01-01"});
  }
  t.log = BehaviorLog(std::move(records));
  return t;
}

TEST(ReplayTest, OracleFuzzyClosesLoop) {
  const Toy t = MakeToy();
  ReplayConfig cfg;
  const ReplayReport r = RunReplay(t.log, t.catalog, Never(), Oracle(t.truth), cfg);
  ASSERT_GE(r.epochs.size(), 3u);
  EXPECT_EQ(r.epochs[0].recall, 0.0);
  EXPECT_EQ(r.epochs[0].truth_pairs, 12u);
  EXPECT_EQ(r.epochs[1].recall, 1.0);
  EXPECT_EQ(r.epochs[1].new_entries, 12u);
  EXPECT_EQ(r.epochs[2].recall, 1.0);
  EXPECT_EQ(r.fixed_point_epoch, 2);
  EXPECT_EQ(r.final_state.entries.size(), 12u);
  EXPECT_EQ(r.final_state.entries.at("query 3").entity_scores.at("e3"), 1.0);
}

TEST(ReplayTest, WrittenBackQueriesAreFoundExactly) {
  // Oracle cold start, blind fuzzy channel: the exact channel alone keeps
  // recall at 1 once the entries exist.
  const Toy t = MakeToy();
  const ReplayReport r = RunReplay(t.log, t.catalog, Oracle(t.truth), Never(), {});
  ASSERT_EQ(r.epochs.size(), 2u);
  EXPECT_EQ(r.epochs[0].recall, 1.0);
  EXPECT_EQ(r.epochs[1].recall, 1.0);
  EXPECT_EQ(r.fixed_point_epoch, 1);
}

TEST(ReplayTest, BlindChannelsStayAtColdStart) {
  const Toy t = MakeToy();
  const ReplayReport r = RunReplay(t.log, t.catalog, Never(), Never(), {});
  EXPECT_EQ(r.fixed_point_epoch, 1);
  for (const EpochReport& e : r.epochs) EXPECT_EQ(e.recall, 0.0);
  EXPECT_TRUE(r.final_state.entries.empty());
}

TEST(ReplayTest, DayByDayReplay) {
  const Toy t = MakeToy();
  ReplayConfig cfg;
  cfg.replay_all_each_epoch = false;
  const ReplayReport r = RunReplay(t.log, t.catalog, Never(), Oracle(t.truth), cfg);
  ASSERT_GE(r.epochs.size(), 3u);
  EXPECT_EQ(r.epochs[0].queries, 4u);
  EXPECT_EQ(r.epochs[1].queries, 8u);
  EXPECT_EQ(r.epochs[2].queries, 12u);
  EXPECT_GE(r.fixed_point_epoch, 3);
}

TEST(ReplayTest, RejectsBadConfig) {
  const Toy t = MakeToy();
  ReplayConfig cfg;
  cfg.epochs = 0;
  EXPECT_SFNS_ERROR(RunReplay(t.log, t.catalog, Never(), Never(), cfg), kValidation);
  cfg = {};
  cfg.k_eval = 0;
  EXPECT_SFNS_ERROR(RunReplay(t.log, t.catalog, Never(), Never(), cfg), kValidation);
}

ChannelFactory Trigram() {
  return [](std::span<const TextDoc> docs) -> std::unique_ptr<Retriever> {
    return std::make_unique<TrigramRetriever>(docs);
  };
}

TEST(ReplayTest, RealChannelsMonotoneAndDeterministic) {
  SynthConfig sc;
  sc.n_entities = 120;
  sc.queries_per_entity = 3;
  const SynthCorpus corpus = GenerateSynthCorpus(sc);
  std::vector<CatalogEntry> catalog;
  for (const TextDoc& d : corpus.docs) catalog.push_back({d.id, d.text});
  const BehaviorLog log(corpus.log);
  ReplayConfig cfg;
  const ReplayReport a = RunReplay(log, catalog, Trigram(), Trigram(), cfg);
  ASSERT_FALSE(a.epochs.empty());
  for (size_t i = 1; i < a.epochs.size(); ++i) {
    EXPECT_GE(a.epochs[i].recall, a.epochs[i - 1].recall) << "epoch " << i;
  }
  EXPECT_GE(a.fixed_point_epoch, 1);
  EXPECT_LE(a.fixed_point_epoch, 15);

  cfg.threads = 4;
  const ReplayReport b = RunReplay(log, catalog, Trigram(), Trigram(), cfg);
  EXPECT_EQ(a.final_state, b.final_state);
  ASSERT_EQ(a.epochs.size(), b.epochs.size());
  for (size_t i = 0; i < a.epochs.size(); ++i) {
    EXPECT_EQ(a.epochs[i].hits, b.epochs[i].hits);
  }

  // Epoch 0 ignores the fuzzy channel entirely.
  const ReplayReport c = RunReplay(log, catalog, Trigram(), Never(), cfg);
  EXPECT_EQ(c.epochs[0].hits, a.epochs[0].hits);
  EXPECT_EQ(c.epochs[0].new_entries, a.epochs[0].new_entries);
}

}  // namespace
}  // namespace sfns
