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

#include <algorithm>
#include <set>

#include "error.h"
#include "parallel.h"
#include "text.h"

namespace sfns {

EpochState WriteBack(const EpochState& state, std::span<const Validated> validated,
                     size_t* added) {
  EpochState next = state;
  size_t count = 0;
  for (const Validated& v : validated) {
    if (!(v.share >= 0.0 && v.share <= 1.0)) {
      throw ValidationError("engagement share must be in [0, 1]");
    }
    HciEntry& entry = next.entries[v.query];
    entry.query = v.query;
    if (entry.entity_scores.emplace(v.entity, v.share).second) ++count;
  }
  if (added != nullptr) *added = count;
  return next;
}

std::vector<EntityScore> HciScore(std::span<const ChannelCandidate> candidates) {
  std::map<std::string, double> scores;
  for (const ChannelCandidate& c : candidates) {
    if (c.entity_scores == nullptr) continue;
    for (const auto& [entity, p] : *c.entity_scores) {
      scores[entity] += c.similarity * p;
    }
  }
  std::vector<EntityScore> out;
  for (const auto& [entity, s] : scores) {
    if (s > 0.0) out.push_back({entity, s});
  }
  // Map order already gives ascending entity ids for equal scores.
  std::stable_sort(out.begin(), out.end(),
                   [](const EntityScore& a, const EntityScore& b) {
                     return a.score > b.score;
                   });
  return out;
}

namespace {

constexpr std::string_view kCatalogPrefix = "c:";
constexpr std::string_view kEntryPrefix = "h:";

struct Snapshot {
  std::vector<TextDoc> docs;
  // Parallel to docs.
  std::vector<const std::map<std::string, double>*> scores;
  std::unique_ptr<Retriever> retriever;
};

double Similarity(double score, double self) {
  if (!(self > 0.0)) return 0.0;
  return std::clamp(score / self, 0.0, 1.0);
}

}  // namespace

ReplayReport RunReplay(const BehaviorLog& raw_log,
                       std::span<const CatalogEntry> catalog,
                       const ChannelFactory& cold_start,
                       const ChannelFactory& fuzzy, const ReplayConfig& config) {
  if (config.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (config.k_eval < 1) throw ValidationError("k_eval must be >= 1");
  if (config.fuzzy_top < 1) throw ValidationError("fuzzy_top must be >= 1");

  const BehaviorLog log(
      std::vector<LogRecord>(raw_log.records().begin(), raw_log.records().end()),
      config.min_engagements);
  const std::vector<std::string> queries = log.Queries();
  std::vector<std::map<std::string, double>> truth(queries.size());
  std::map<std::string, std::string> first_day;
  for (const LogRecord& r : log.records()) {
    auto [it, inserted] = first_day.emplace(r.query, r.day);
    if (!inserted && r.day < it->second) it->second = r.day;
  }
  std::set<std::string> day_set;
  for (size_t i = 0; i < queries.size(); ++i) {
    truth[i] = log.EngagementShares(queries[i]);
    day_set.insert(first_day.at(queries[i]));
  }
  const std::vector<std::string> days(day_set.begin(), day_set.end());

  std::vector<std::map<std::string, double>> catalog_scores;
  std::vector<TextDoc> catalog_docs;
  for (const CatalogEntry& c : catalog) {
    catalog_docs.push_back({std::string(kCatalogPrefix) + c.entity, c.text, c.entity});
    catalog_scores.push_back({{c.entity, 1.0}});
  }

  ReplayReport report;
  EpochState state;
  for (size_t epoch = 0; epoch <= config.epochs; ++epoch) {
    // Queries in play this epoch.
    std::vector<size_t> active;
    const bool all_days =
        config.replay_all_each_epoch || epoch + 1 >= days.size();
    for (size_t i = 0; i < queries.size(); ++i) {
      if (all_days || first_day.at(queries[i]) <= days[epoch]) active.push_back(i);
    }

    Snapshot snap;
    snap.docs = catalog_docs;
    for (const auto& s : catalog_scores) snap.scores.push_back(&s);
    if (epoch > 0) {
      for (const auto& [q, entry] : state.entries) {
        snap.docs.push_back({std::string(kEntryPrefix) + q, q, ""});
        snap.scores.push_back(&entry.entity_scores);
      }
    }
    snap.retriever = (epoch == 0 ? cold_start : fuzzy)(snap.docs);
    std::map<std::string, size_t> doc_index;
    for (size_t d = 0; d < snap.docs.size(); ++d) doc_index[snap.docs[d].id] = d;
    const auto& retriever_docs = snap.retriever->docs();

    std::vector<std::vector<EntityScore>> ranked(active.size());
    ParallelFor(active.size(), config.threads, [&](size_t a) {
      const std::string& q = queries[active[a]];
      std::vector<ChannelCandidate> candidates;
      const std::string exact_key = std::string(kEntryPrefix) + q;
      if (epoch > 0) {
        if (auto it = state.entries.find(q); it != state.entries.end()) {
          candidates.push_back({&it->second.entity_scores, 1.0});
        }
      }
      const size_t depth = epoch == 0 ? config.k_eval : config.fuzzy_top;
      const std::vector<SearchHit> hits = snap.retriever->Search(q, depth);
      const double self = hits.empty() ? 0.0 : snap.retriever->SelfScore(q);
      for (const SearchHit& h : hits) {
        const std::string& key = retriever_docs[h.doc].id;
        // The exact channel already covers this stored query at 1.0.
        if (epoch > 0 && key == exact_key) continue;
        candidates.push_back(
            {snap.scores[doc_index.at(key)], Similarity(h.score, self)});
      }
      std::vector<EntityScore> scored = HciScore(candidates);
      if (scored.size() > config.k_eval) scored.resize(config.k_eval);
      ranked[a] = std::move(scored);
    });

    EpochReport er;
    er.epoch = epoch;
    er.queries = active.size();
    std::vector<Validated> validated;
    for (size_t a = 0; a < active.size(); ++a) {
      const std::string& q = queries[active[a]];
      const auto& t = truth[active[a]];
      er.truth_pairs += t.size();
      for (const EntityScore& es : ranked[a]) {
        auto it = t.find(es.entity);
        if (it == t.end()) continue;
        ++er.hits;
        validated.push_back({q, es.entity, it->second});
      }
    }
    er.recall = er.truth_pairs == 0 ? 0.0
                                    : static_cast<double>(er.hits) /
                                          static_cast<double>(er.truth_pairs);
    state = WriteBack(state, validated, &er.new_entries);
    state.epoch = epoch;
    state.recall = er.recall;
    for (const auto& [_, entry] : state.entries) {
      er.total_entries += entry.entity_scores.size();
    }
    report.epochs.push_back(er);
    if (epoch >= 1 && er.new_entries == 0 && all_days) {
      report.fixed_point_epoch = static_cast<long>(epoch);
      break;
    }
  }
  report.final_state = std::move(state);
  return report;
}

}  // namespace sfns
