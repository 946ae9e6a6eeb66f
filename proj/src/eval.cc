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

#include "eval.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <string_view>

#include "error.h"
#include "io.h"
#include "json.hpp"
#include "parallel.h"
#include "text.h"

namespace sfns {
namespace {

void CheckK(size_t k) {
  if (k < 1) throw ValidationError("k must be >= 1");
}

// A relevant key counts once, at its first position.
std::vector<bool> Gains(std::span<const std::string> ranked,
                        const std::set<std::string>& relevant, size_t k) {
  std::vector<bool> gains(std::min(k, ranked.size()), false);
  std::set<std::string_view> seen;
  for (size_t i = 0; i < gains.size(); ++i) {
    gains[i] = relevant.count(ranked[i]) > 0 && seen.insert(ranked[i]).second;
  }
  return gains;
}

size_t HitsInTop(std::span<const std::string> ranked,
                 const std::set<std::string>& relevant, size_t k) {
  const std::vector<bool> gains = Gains(ranked, relevant, k);
  return static_cast<size_t>(std::count(gains.begin(), gains.end(), true));
}

template <typename Fn>
void ForEachJsonLine(const std::string& path, Fn&& fn) {
  ForEachLine(path, [&](size_t line_no, std::string_view line) {
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
}

}  // namespace

double RecallAtK(std::span<const std::string> ranked,
                 const std::set<std::string>& relevant, size_t k) {
  CheckK(k);
  if (relevant.empty()) return 0.0;
  return static_cast<double>(HitsInTop(ranked, relevant, k)) /
         static_cast<double>(relevant.size());
}

double PrecisionAtK(std::span<const std::string> ranked,
                    const std::set<std::string>& relevant, size_t k) {
  CheckK(k);
  return static_cast<double>(HitsInTop(ranked, relevant, k)) /
         static_cast<double>(k);
}

double NdcgAtK(std::span<const std::string> ranked,
               const std::set<std::string>& relevant, size_t k) {
  CheckK(k);
  double dcg = 0.0;
  const std::vector<bool> gains = Gains(ranked, relevant, k);
  for (size_t i = 0; i < gains.size(); ++i) {
    if (gains[i]) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  double ideal = 0.0;
  for (size_t i = 0; i < std::min(k, relevant.size()); ++i) {
    ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  return ideal > 0.0 ? dcg / ideal : 0.0;
}

Qrels LoadQrels(const std::string& path) {
  Qrels qrels;
  ForEachJsonLine(path, [&](const nlohmann::json& j) {
    auto& rel = qrels[Normalize(j.at("q").get<std::string>())];
    for (const auto& r : j.at("rel")) rel.insert(r.get<std::string>());
  });
  return qrels;
}

std::vector<EvalQuery> LoadQueries(const std::string& path) {
  std::vector<EvalQuery> queries;
  ForEachJsonLine(path, [&](const nlohmann::json& j) {
    queries.push_back(
        {j.at("q").get<std::string>(), j.value("slice", std::string())});
  });
  return queries;
}

BenchmarkReport RunBenchmark(std::span<const EvalQuery> queries,
                             const Qrels& qrels, const Retriever& retriever,
                             const BenchmarkOptions& options) {
  if (options.ks.empty()) throw ValidationError("at least one k is required");
  for (size_t k : options.ks) CheckK(k);
  const size_t max_k = *std::max_element(options.ks.begin(), options.ks.end());

  struct Row {
    const EvalQuery* query = nullptr;
    const std::set<std::string>* relevant = nullptr;
    std::vector<MetricsAtK> metrics;
  };
  std::vector<Row> rows(queries.size());
  for (size_t i = 0; i < queries.size(); ++i) {
    rows[i].query = &queries[i];
    auto it = qrels.find(Normalize(queries[i].text));
    if (it != qrels.end() && !it->second.empty()) rows[i].relevant = &it->second;
  }

  auto evaluate = [&](size_t i) {
    Row& row = rows[i];
    if (row.relevant == nullptr) return;
    // Several documents may carry the same key (e.g. one entity's stored
    // queries); the key is ranked at its first appearance.
    // Fetch deeper until max_k distinct keys or the retriever runs dry.
    std::vector<std::string> ranked;
    for (size_t depth = max_k;; depth *= 2) {
      const std::vector<SearchHit> hits = retriever.Search(row.query->text, depth);
      ranked.clear();
      std::set<std::string> seen;
      for (const SearchHit& h : hits) {
        const DocEntry& d = retriever.docs()[h.doc];
        const std::string& key = options.key == RelevanceKey::kId ? d.id : d.payload;
        if (seen.insert(key).second) ranked.push_back(key);
      }
      if (ranked.size() >= max_k || hits.size() < depth) break;
    }
    row.metrics.clear();
    for (size_t k : options.ks) {
      row.metrics.push_back({k, RecallAtK(ranked, *row.relevant, k),
                             PrecisionAtK(ranked, *row.relevant, k),
                             NdcgAtK(ranked, *row.relevant, k)});
    }
  };

  for (size_t i = 0; i < std::min(options.warmup, rows.size()); ++i) evaluate(i);
  const auto start = std::chrono::steady_clock::now();
  ParallelFor(rows.size(), options.threads, evaluate);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;

  BenchmarkReport report;
  report.ks = options.ks;
  report.total_queries = queries.size();
  report.elapsed_seconds = elapsed.count();
  report.qps = elapsed.count() > 0.0
                   ? static_cast<double>(queries.size()) / elapsed.count()
                   : 0.0;

  // Reduce in a canonical row order so the sums do not depend on input order.
  std::vector<const Row*> order;
  for (const Row& r : rows) {
    if (r.relevant == nullptr) {
      ++report.missing_qrels;
    } else {
      order.push_back(&r);
    }
  }
  std::sort(order.begin(), order.end(), [](const Row* a, const Row* b) {
    return std::tie(a->query->text, a->query->slice) <
           std::tie(b->query->text, b->query->slice);
  });
  report.evaluated = order.size();

  auto accumulate = [&](SliceReport& s, const Row& r) {
    if (s.metrics.empty()) {
      for (size_t k : options.ks) s.metrics.push_back({k, 0.0, 0.0, 0.0});
    }
    ++s.queries;
    for (size_t j = 0; j < s.metrics.size(); ++j) {
      s.metrics[j].recall += r.metrics[j].recall;
      s.metrics[j].precision += r.metrics[j].precision;
      s.metrics[j].ndcg += r.metrics[j].ndcg;
    }
  };
  for (const Row* r : order) {
    accumulate(report.overall, *r);
    if (!r->query->slice.empty()) accumulate(report.slices[r->query->slice], *r);
  }
  auto finish = [&](SliceReport& s) {
    if (s.metrics.empty()) {
      for (size_t k : options.ks) s.metrics.push_back({k, 0.0, 0.0, 0.0});
      return;
    }
    const double n = static_cast<double>(s.queries);
    for (MetricsAtK& m : s.metrics) {
      m.recall /= n;
      m.precision /= n;
      m.ndcg /= n;
    }
  };
  finish(report.overall);
  for (auto& [_, s] : report.slices) finish(s);
  return report;
}

}  // namespace sfns
