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

// Binary-relevance metrics and a benchmark runner over any Retriever.

#ifndef SFNS_EVAL_H_
#define SFNS_EVAL_H_

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "retrieval.h"

namespace sfns {

// `ranked` holds document keys in rank order. k < 1 is a validation error.
double RecallAtK(std::span<const std::string> ranked,
                 const std::set<std::string>& relevant, size_t k);
double PrecisionAtK(std::span<const std::string> ranked,
                    const std::set<std::string>& relevant, size_t k);
// Gain 1 per relevant hit, discount 1 / log2(rank + 1), ideal DCG over
// min(k, |relevant|) hits.
double NdcgAtK(std::span<const std::string> ranked,
               const std::set<std::string>& relevant, size_t k);

// Normalized query text -> relevant document keys.
using Qrels = std::map<std::string, std::set<std::string>>;

struct EvalQuery {
  std::string text;
  std::string slice;  // optional grouping label
};

// JSONL {"q": ..., "rel": [...]}. Keys are normalized; rows for the same
// query are merged.
Qrels LoadQrels(const std::string& path);
// JSONL {"q": ..., "slice": ...}; "slice" is optional.
std::vector<EvalQuery> LoadQueries(const std::string& path);

enum class RelevanceKey {
  kId,       // DocEntry::id
  kPayload,  // DocEntry::payload
};

struct BenchmarkOptions {
  std::vector<size_t> ks = {1, 10, 25};
  size_t threads = 1;
  // Leading queries run once untimed before the measured pass.
  size_t warmup = 0;
  RelevanceKey key = RelevanceKey::kId;
};

struct MetricsAtK {
  size_t k = 0;
  double recall = 0.0;
  double precision = 0.0;
  double ndcg = 0.0;
};

struct SliceReport {
  size_t queries = 0;
  std::vector<MetricsAtK> metrics;  // one per k, in option order
};

struct BenchmarkReport {
  std::vector<size_t> ks;
  size_t total_queries = 0;
  size_t evaluated = 0;
  size_t missing_qrels = 0;
  SliceReport overall;
  std::map<std::string, SliceReport> slices;  // labelled queries only
  double elapsed_seconds = 0.0;
  double qps = 0.0;
};

BenchmarkReport RunBenchmark(std::span<const EvalQuery> queries,
                             const Qrels& qrels, const Retriever& retriever,
                             const BenchmarkOptions& options);

}  // namespace sfns

#endif  // SFNS_EVAL_H_
