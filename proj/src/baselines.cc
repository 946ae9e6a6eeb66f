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
#include <set>

#include "error.h"
#include "text.h"

namespace sfns {
namespace {

std::vector<std::u32string> NormalizedWords(std::string_view text) {
  const std::string normalized = Normalize(text);
  std::vector<std::u32string> out;
  for (std::string_view w : SplitWords(normalized)) out.push_back(ToCodePoints(w));
  return out;
}

}  // namespace

TrigramRetriever::TrigramRetriever(std::span<const TextDoc> docs) {
  std::vector<DocInput> inputs;
  inputs.reserve(docs.size());
  for (const TextDoc& d : docs) {
    std::vector<SparseEntry> entries;
    for (const std::string& tri : Trigrams(Normalize(d.text))) {
      auto [it, inserted] =
          vocab_.emplace(tri, static_cast<TokenId>(vocab_.size()));
      entries.push_back({it->second, 1.0});
    }
    inputs.push_back({d.id, d.text, SparseVector(std::move(entries)), d.payload});
  }
  index_ = InvertedIndex::Build(inputs);
}

SparseVector TrigramRetriever::EncodeQuery(std::string_view query) const {
  std::vector<SparseEntry> entries;
  for (const std::string& tri : Trigrams(Normalize(query))) {
    auto it = vocab_.find(tri);
    // Trigrams no document contains cannot contribute to any score.
    if (it == vocab_.end()) continue;
    entries.push_back({it->second, Idf(index_.stats(), it->second)});
  }
  return SparseVector(std::move(entries));
}

std::vector<SearchHit> TrigramRetriever::Search(std::string_view query,
                                                size_t k) const {
  return index_.Search(EncodeQuery(query), k);
}

double TrigramRetriever::SelfScore(std::string_view query) const {
  double score = 0.0;
  const SparseVector q = EncodeQuery(query);
  for (const SparseEntry& e : q.entries()) score += e.weight;
  return score;
}

void FuzzyConfig::Validate() const {
  if (max_edits < 1 || max_edits > 2) {
    throw ValidationError("max_edits must be 1 or 2");
  }
  if (prefix_lock < 0 || prefix_lock > 4) {
    throw ValidationError("prefix_lock must be in [0, 4]");
  }
}

size_t BoundedLevenshtein(std::u32string_view a, std::u32string_view b,
                          size_t max_edits) {
  const size_t n = a.size();
  const size_t m = b.size();
  const size_t over = max_edits + 1;
  if ((n > m ? n - m : m - n) > max_edits) return over;
  // Cells outside |i - j| <= max_edits are treated as `over`.
  std::vector<size_t> prev(m + 1, over), cur(m + 1, over);
  for (size_t j = 0; j <= std::min(m, max_edits); ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    const size_t lo = i > max_edits ? i - max_edits : 0;
    const size_t hi = std::min(m, i + max_edits);
    std::fill(cur.begin(), cur.end(), over);
    if (lo == 0) cur[0] = i;
    size_t row_min = lo == 0 ? cur[0] : over;
    for (size_t j = std::max<size_t>(lo, 1); j <= hi; ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      const size_t del = prev[j] + 1;
      const size_t ins = cur[j - 1] + 1;
      cur[j] = std::min({sub, del, ins, over});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min >= over) return over;
    std::swap(prev, cur);
  }
  return std::min(prev[m], over);
}

FuzzyRetriever::FuzzyRetriever(std::span<const TextDoc> docs, FuzzyConfig config)
    : config_(config) {
  config_.Validate();
  for (const TextDoc& d : docs) {
    docs_.push_back({d.id, d.text, d.payload});
    std::vector<std::u32string> words = NormalizedWords(d.text);
    const std::set<std::u32string> distinct(words.begin(), words.end());
    for (const auto& w : distinct) ++word_df_[w];
    doc_words_.push_back(std::move(words));
  }
}

double FuzzyRetriever::WordWeight(const std::u32string& word) const {
  auto it = word_df_.find(word);
  const double df = it == word_df_.end() ? 0.0 : static_cast<double>(it->second);
  const double n = static_cast<double>(docs_.size());
  return std::log((n + 1.0) / (df + 1.0)) + 1.0;
}

std::vector<SearchHit> FuzzyRetriever::Search(std::string_view query,
                                              size_t k) const {
  if (k < 1) throw ValidationError("k must be >= 1");
  const std::vector<std::u32string> words = NormalizedWords(query);
  std::vector<double> weights;
  for (const std::u32string& w : words) weights.push_back(WordWeight(w));
  const size_t max_edits = static_cast<size_t>(config_.max_edits);
  const size_t lock = static_cast<size_t>(config_.prefix_lock);
  std::vector<SearchHit> hits;
  for (DocId d = 0; d < doc_words_.size(); ++d) {
    double score = 0.0;
    for (size_t q = 0; q < words.size(); ++q) {
      const std::u32string& qw = words[q];
      size_t best = max_edits + 1;
      for (const std::u32string& dw : doc_words_[d]) {
        if (qw.substr(0, lock) != dw.substr(0, lock)) continue;
        best = std::min(best, BoundedLevenshtein(qw, dw, max_edits));
        if (best == 0) break;
      }
      if (best <= max_edits) {
        const double closeness =
            1.0 - static_cast<double>(best) / static_cast<double>(qw.size());
        if (closeness > 0.0) score += closeness * weights[q];
      }
    }
    if (score > 0.0) hits.push_back({d, score, 0});
  }
  const size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + n, hits.end(),
                    [](const SearchHit& a, const SearchHit& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.doc < b.doc;
                    });
  hits.resize(n);
  for (size_t i = 0; i < n; ++i) hits[i].rank = static_cast<uint32_t>(i + 1);
  return hits;
}

double FuzzyRetriever::SelfScore(std::string_view query) const {
  double score = 0.0;
  for (const std::u32string& w : NormalizedWords(query)) score += WordWeight(w);
  return score;
}

}  // namespace sfns
