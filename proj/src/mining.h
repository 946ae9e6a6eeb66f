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

// Weak supervision from behavior logs: positive pairs by lexical proximity,
// hard negatives from a retriever, and component-wise train/test splits.

#ifndef SFNS_MINING_H_
#define SFNS_MINING_H_

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfns {

struct LogRecord {
  std::string query;
  std::string entity;
  int64_t engagements = 1;
  std::string day;  // YYYY-MM-DD

  bool operator==(const LogRecord&) const = default;
};

class BehaviorLog {
 public:
  BehaviorLog() = default;

  // Queries are normalized. Records with fewer than `min_engagements` are
  // dropped; engagements < 1 or an empty query/entity is a validation error.
  explicit BehaviorLog(std::vector<LogRecord> records,
                       int64_t min_engagements = 1);

  std::span<const LogRecord> records() const { return records_; }
  bool empty() const { return records_.empty(); }

  // Distinct normalized queries in sorted order.
  std::vector<std::string> Queries() const;
  const std::set<std::string>& EntitiesOf(const std::string& query) const;
  bool ShareEntity(const std::string& a, const std::string& b) const;

  // P(E | query): engagement share of each entity among the query's records.
  std::map<std::string, double> EngagementShares(const std::string& query) const;

 private:
  std::vector<LogRecord> records_;
  std::map<std::string, std::set<std::string>> entities_;
  std::map<std::string, std::map<std::string, int64_t>> counts_;
};

BehaviorLog LoadBehaviorLog(const std::string& path, int64_t min_engagements = 1);

// Unit-cost edit distance over code points.
size_t Levenshtein(std::u32string_view a, std::u32string_view b);
size_t Levenshtein(std::string_view a, std::string_view b);

// max(1, floor(len / 10)).
size_t DistanceThreshold(size_t len);

// Length-ratio and distance rules on two distinct normalized queries.
bool LexicallyClose(std::string_view a, std::string_view b);

struct MinedPair {
  std::string q;
  std::string q_pos;
  std::vector<std::string> shared_entities;  // sorted, non-empty

  bool operator==(const MinedPair&) const = default;
};

// Both orientations of every accepted unordered pair, sorted by (q, q_pos).
std::vector<MinedPair> MinePositivePairs(const BehaviorLog& log);

struct TrainTriple {
  std::string q;
  std::string q_pos;
  std::vector<std::string> negatives;

  bool operator==(const TrainTriple&) const = default;
};

// Ranked candidate queries for a query string.
using CandidateSource =
    std::function<std::vector<std::string>(std::string_view query)>;

struct NegativeMiningResult {
  std::vector<TrainTriple> triples;
  // Triples that ended up with fewer than n negatives.
  size_t starved = 0;
};

NegativeMiningResult MineHardNegatives(std::span<const MinedPair> pairs,
                                       const CandidateSource& source,
                                       const BehaviorLog& log, size_t n);

struct SplitResult {
  std::vector<std::string> train_queries;
  std::vector<std::string> test_queries;
  std::vector<std::string> train_entities;
  std::vector<std::string> test_entities;
  // Component ids (position in the sorted component list) per side.
  std::vector<size_t> train_components;
  std::vector<size_t> test_components;
  size_t component_count = 0;
};

SplitResult SplitByComponents(const BehaviorLog& log, double test_fraction,
                              uint64_t seed);

}  // namespace sfns

#endif  // SFNS_MINING_H_
