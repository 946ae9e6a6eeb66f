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
#include <numeric>
#include <unordered_map>

#include "error.h"
#include "io.h"
#include "json.hpp"
#include "random.h"
#include "text.h"

namespace sfns {

BehaviorLog::BehaviorLog(std::vector<LogRecord> records, int64_t min_engagements) {
  for (LogRecord& r : records) {
    if (r.engagements < 1) {
      throw ValidationError("engagements must be >= 1 for query '" + r.query + "'");
    }
    r.query = Normalize(r.query);
    if (r.query.empty()) throw ValidationError("empty query in behavior log");
    if (r.entity.empty()) throw ValidationError("empty entity in behavior log");
    if (r.engagements < min_engagements) continue;
    entities_[r.query].insert(r.entity);
    counts_[r.query][r.entity] += r.engagements;
    records_.push_back(std::move(r));
  }
}

std::vector<std::string> BehaviorLog::Queries() const {
  std::vector<std::string> out;
  out.reserve(entities_.size());
  for (const auto& [q, _] : entities_) out.push_back(q);
  return out;
}

const std::set<std::string>& BehaviorLog::EntitiesOf(const std::string& query) const {
  static const std::set<std::string> kEmpty;
  auto it = entities_.find(query);
  return it == entities_.end() ? kEmpty : it->second;
}

bool BehaviorLog::ShareEntity(const std::string& a, const std::string& b) const {
  const auto& ea = EntitiesOf(a);
  const auto& eb = EntitiesOf(b);
  for (const std::string& e : ea) {
    if (eb.count(e)) return true;
  }
  return false;
}

std::map<std::string, double> BehaviorLog::EngagementShares(
    const std::string& query) const {
  std::map<std::string, double> out;
  auto it = counts_.find(query);
  if (it == counts_.end()) return out;
  int64_t total = 0;
  for (const auto& [_, n] : it->second) total += n;
  for (const auto& [e, n] : it->second) {
    out[e] = static_cast<double>(n) / static_cast<double>(total);
  }
  return out;
}

BehaviorLog LoadBehaviorLog(const std::string& path, int64_t min_engagements) {
  std::vector<LogRecord> records;
  ForEachLine(path, [&](size_t line_no, std::string_view line) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      LogRecord r;
      r.query = j.at("q").get<std::string>();
      r.entity = j.at("e").get<std::string>();
      r.engagements = j.value("n", int64_t{1});
      r.day = j.value("day", std::string());
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return BehaviorLog(std::move(records), min_engagements);
}

size_t Levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), size_t{0});
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

size_t Levenshtein(std::string_view a, std::string_view b) {
  return Levenshtein(ToCodePoints(a), ToCodePoints(b));
}

size_t DistanceThreshold(size_t len) { return std::max<size_t>(1, len / 10); }

bool LexicallyClose(std::string_view a, std::string_view b) {
  const std::u32string ua = ToCodePoints(a);
  const std::u32string ub = ToCodePoints(b);
  const size_t shorter = std::min(ua.size(), ub.size());
  const size_t longer = std::max(ua.size(), ub.size());
  if (longer == 0) return false;
  // Integer form of shorter / longer >= 0.8.
  if (5 * shorter < 4 * longer) return false;
  return Levenshtein(ua, ub) <= DistanceThreshold(shorter);
}

std::vector<MinedPair> MinePositivePairs(const BehaviorLog& log) {
  std::map<std::string, std::vector<std::string>> by_entity;
  for (const std::string& q : log.Queries()) {
    for (const std::string& e : log.EntitiesOf(q)) by_entity[e].push_back(q);
  }
  std::map<std::pair<std::string, std::string>, std::set<std::string>> accepted;
  std::set<std::pair<std::string, std::string>> rejected;
  for (const auto& [entity, queries] : by_entity) {
    for (size_t i = 0; i < queries.size(); ++i) {
      for (size_t j = i + 1; j < queries.size(); ++j) {
        const auto key = std::make_pair(queries[i], queries[j]);
        if (auto it = accepted.find(key); it != accepted.end()) {
          it->second.insert(entity);
          continue;
        }
        if (rejected.count(key)) continue;
        if (LexicallyClose(queries[i], queries[j])) {
          accepted[key].insert(entity);
        } else {
          rejected.insert(key);
        }
      }
    }
  }
  std::vector<MinedPair> out;
  for (const auto& [key, shared] : accepted) {
    std::vector<std::string> entities(shared.begin(), shared.end());
    out.push_back({key.first, key.second, entities});
    out.push_back({key.second, key.first, entities});
  }
  std::sort(out.begin(), out.end(), [](const MinedPair& x, const MinedPair& y) {
    return std::tie(x.q, x.q_pos) < std::tie(y.q, y.q_pos);
  });
  return out;
}

NegativeMiningResult MineHardNegatives(std::span<const MinedPair> pairs,
                                       const CandidateSource& source,
                                       const BehaviorLog& log, size_t n) {
  NegativeMiningResult result;
  for (const MinedPair& pair : pairs) {
    TrainTriple triple{pair.q, pair.q_pos, {}};
    if (n > 0) {
      std::vector<std::string> candidates;
      try {
        candidates = source(pair.q);
      } catch (const Error& e) {
        throw Error(e.code(), "mining negatives for ('" + pair.q + "', '" +
                                  pair.q_pos + "'): " + e.what());
      }
      std::set<std::string> seen;
      for (std::string& c : candidates) {
        if (triple.negatives.size() >= n) break;
        c = Normalize(c);
        if (c == pair.q || c == pair.q_pos) continue;
        if (log.ShareEntity(pair.q, c)) continue;
        if (!seen.insert(c).second) continue;
        triple.negatives.push_back(c);
      }
      if (triple.negatives.size() < n) ++result.starved;
    }
    result.triples.push_back(std::move(triple));
  }
  return result;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }

  size_t Find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void Union(size_t a, size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<size_t> parent_;
};

}  // namespace

SplitResult SplitByComponents(const BehaviorLog& log, double test_fraction,
                              uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must be in (0, 1)");
  }
  if (log.empty()) throw ValidationError("behavior log is empty");
  const std::vector<std::string> queries = log.Queries();
  std::map<std::string, size_t> entity_ids;
  for (const std::string& q : queries) {
    for (const std::string& e : log.EntitiesOf(q)) {
      entity_ids.emplace(e, 0);
    }
  }
  size_t next = queries.size();
  for (auto& [_, id] : entity_ids) id = next++;

  DisjointSets sets(next);
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    for (const std::string& e : log.EntitiesOf(queries[qi])) {
      sets.Union(qi, entity_ids.at(e));
    }
  }
  // Roots are the smallest member, so components come out ordered by their
  // first query.
  std::map<size_t, size_t> root_to_component;
  std::vector<std::vector<size_t>> component_queries;
  std::vector<std::vector<std::string>> component_entities;
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    const size_t root = sets.Find(qi);
    auto [it, inserted] = root_to_component.emplace(root, component_queries.size());
    if (inserted) {
      component_queries.emplace_back();
      component_entities.emplace_back();
    }
    component_queries[it->second].push_back(qi);
  }
  for (const auto& [e, id] : entity_ids) {
    component_entities[root_to_component.at(sets.Find(id))].push_back(e);
  }

  const double total = static_cast<double>(queries.size());
  size_t largest = 0;
  for (const auto& c : component_queries) largest = std::max(largest, c.size());
  if (static_cast<double>(largest) / total > 1.0 - test_fraction) {
    throw ValidationError(
        "split infeasible: largest component holds " + std::to_string(largest) +
        " of " + std::to_string(queries.size()) + " queries across " +
        std::to_string(component_queries.size()) + " components");
  }

  std::vector<size_t> order(component_queries.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.Shuffle(order);

  SplitResult out;
  out.component_count = component_queries.size();
  const double target = test_fraction * total;
  double test_mass = 0.0;
  for (size_t c : order) {
    const bool to_test = test_mass < target;
    if (to_test) test_mass += static_cast<double>(component_queries[c].size());
    auto& qs = to_test ? out.test_queries : out.train_queries;
    auto& es = to_test ? out.test_entities : out.train_entities;
    (to_test ? out.test_components : out.train_components).push_back(c);
    for (size_t qi : component_queries[c]) qs.push_back(queries[qi]);
    es.insert(es.end(), component_entities[c].begin(), component_entities[c].end());
  }
  for (auto* v : {&out.train_queries, &out.test_queries, &out.train_entities,
                  &out.test_entities}) {
    std::sort(v->begin(), v->end());
  }
  std::sort(out.train_components.begin(), out.train_components.end());
  std::sort(out.test_components.begin(), out.test_components.end());
  return out;
}

}  // namespace sfns
