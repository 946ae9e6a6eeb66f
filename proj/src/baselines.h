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

// Non-neural comparison retrievers: character-trigram matching on the shared
// inverted index, and per-word fuzzy edit-distance matching.

#ifndef SFNS_BASELINES_H_
#define SFNS_BASELINES_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "retrieval.h"

namespace sfns {

// Documents store weight 1.0 per distinct trigram; queries use IDF weights.
// Trigrams never span word boundaries.
class TrigramRetriever : public Retriever {
 public:
  explicit TrigramRetriever(std::span<const TextDoc> docs);

  std::vector<SearchHit> Search(std::string_view query, size_t k) const override;
  double SelfScore(std::string_view query) const override;
  std::span<const DocEntry> docs() const override { return index_.docs(); }

  SparseVector EncodeQuery(std::string_view query) const;
  const InvertedIndex& index() const { return index_; }

 private:
  std::unordered_map<std::string, TokenId> vocab_;
  InvertedIndex index_;
};

struct FuzzyConfig {
  int max_edits = 1;    // 1 or 2
  int prefix_lock = 0;  // leading characters that must match exactly, <= 4

  void Validate() const;
};

// Edit distance if it is <= max_edits, otherwise max_edits + 1. Runs a
// diagonal band of width max_edits and exits early on the length gap.
size_t BoundedLevenshtein(std::u32string_view a, std::u32string_view b,
                          size_t max_edits);

// Linear scan. Each query word takes its best document word within the edit
// budget; score = sum over query words of (1 - dist / len) * word_idf.
class FuzzyRetriever : public Retriever {
 public:
  FuzzyRetriever(std::span<const TextDoc> docs, FuzzyConfig config);

  std::vector<SearchHit> Search(std::string_view query, size_t k) const override;
  double SelfScore(std::string_view query) const override;
  std::span<const DocEntry> docs() const override { return docs_; }

  // ln((N + 1) / (df + 1)) + 1 over exact whole-word document frequency.
  double WordWeight(const std::u32string& word) const;

 private:
  FuzzyConfig config_;
  std::vector<DocEntry> docs_;
  std::vector<std::vector<std::u32string>> doc_words_;
  std::unordered_map<std::u32string, uint64_t> word_df_;
};

}  // namespace sfns

#endif  // SFNS_BASELINES_H_
