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

// Replay of the high-confidence index (HCI) feedback loop. Stored queries Q'
// carry engagement probabilities P(E|Q'); a query Q scores entities by
// sum over candidates Q' of P(Q'|Q) * P(E|Q'). Validated retrievals are
// written back so later lookups hit them through the exact channel.

#ifndef SFNS_HCI_SIM_H_
#define SFNS_HCI_SIM_H_

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mining.h"
#include "retrieval.h"

namespace sfns {

struct HciEntry {
  std::string query;
  std::map<std::string, double> entity_scores;  // P(E | query)

  bool operator==(const HciEntry&) const = default;
};

struct EpochState {
  size_t epoch = 0;
  std::map<std::string, HciEntry> entries;  // keyed by normalized query
  double recall = 0.0;

  bool operator==(const EpochState&) const = default;
};

struct Validated {
  std::string query;
  std::string entity;
  double share = 0.0;  // in [0, 1]
};

// Union of the existing entries and `validated`. Existing probabilities are
// frozen; a pair already present is left untouched.
EpochState WriteBack(const EpochState& state, std::span<const Validated> validated,
                     size_t* added = nullptr);

struct ChannelCandidate {
  const std::map<std::string, double>* entity_scores = nullptr;
  double similarity = 0.0;  // P(Q'|Q) in [0, 1]
};

struct EntityScore {
  std::string entity;
  double score = 0.0;

  bool operator==(const EntityScore&) const = default;
};

// Ranked by score descending, then entity id ascending. Zero scores dropped.
std::vector<EntityScore> HciScore(std::span<const ChannelCandidate> candidates);

// Builds a fuzzy retriever over a snapshot of stored documents.
using ChannelFactory =
    std::function<std::unique_ptr<Retriever>(std::span<const TextDoc> docs)>;

struct CatalogEntry {
  std::string entity;
  std::string text;
};

struct ReplayConfig {
  size_t epochs = 15;
  size_t k_eval = 25;
  size_t fuzzy_top = 10;
  // Queries with fewer engagements are not ground truth.
  int64_t min_engagements = 4;
  // true: every epoch replays all queries; false: epoch t replays the days
  // seen so far.
  bool replay_all_each_epoch = true;
  size_t threads = 1;
};

struct EpochReport {
  size_t epoch = 0;
  size_t queries = 0;
  size_t truth_pairs = 0;
  size_t hits = 0;
  double recall = 0.0;
  size_t new_entries = 0;
  size_t total_entries = 0;
};

struct ReplayReport {
  std::vector<EpochReport> epochs;
  // First epoch >= 1 that added nothing; -1 if none within the budget.
  long fixed_point_epoch = -1;
  EpochState final_state;
};

// Epoch 0 matches queries against catalog text through `cold_start`; later
// epochs use the exact channel over written-back entries plus `fuzzy` over
// catalog and entries, capped at fuzzy_top. Fuzzy similarity is the hit score
// divided by the query's self score, clamped to [0, 1].
ReplayReport RunReplay(const BehaviorLog& log, std::span<const CatalogEntry> catalog,
                       const ChannelFactory& cold_start,
                       const ChannelFactory& fuzzy, const ReplayConfig& config);

}  // namespace sfns

#endif  // SFNS_HCI_SIM_H_
