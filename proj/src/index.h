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

// Inverted index over binary16-quantized document vectors with exact
// term-at-a-time top-k dot-product search.

#ifndef SFNS_INDEX_H_
#define SFNS_INDEX_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sparse.h"

namespace sfns {

using DocId = uint64_t;

struct Posting {
  DocId doc = 0;
  QuantizedWeight weight;

  bool operator==(const Posting&) const = default;
};

struct DocEntry {
  std::string id;       // external id
  std::string text;     // the stored query text Q'
  std::string payload;  // optional, e.g. an entity id

  bool operator==(const DocEntry&) const = default;
};

struct DocInput {
  std::string id;
  std::string text;
  SparseVector vector;
  std::string payload;
};

struct SearchHit {
  DocId doc = 0;
  double score = 0.0;
  uint32_t rank = 0;  // 1-based

  bool operator==(const SearchHit&) const = default;
};

class InvertedIndex {
 public:
  InvertedIndex() = default;

  // Doc ids follow input order. Duplicate external ids are rejected.
  static InvertedIndex Build(std::span<const DocInput> docs);

  // Exact top-k by dot product against the dequantized postings. Ties go to
  // the smaller doc id; documents scoring 0 are never returned.
  std::vector<SearchHit> Search(const SparseVector& query, size_t k) const;

  size_t doc_count() const { return docs_.size(); }
  const DocEntry& doc(DocId id) const { return docs_.at(id); }
  std::span<const DocEntry> docs() const { return docs_; }
  const std::map<TokenId, std::vector<Posting>>& postings() const {
    return postings_;
  }
  const VocabStats& stats() const { return stats_; }

  // Mean number of stored non-zero dimensions per document.
  double AverageNonZeroDims() const;
  size_t posting_count() const;

  bool operator==(const InvertedIndex&) const = default;

 private:
  friend InvertedIndex DeserializeIndex(std::span<const uint8_t> bytes);

  std::vector<DocEntry> docs_;
  std::map<TokenId, std::vector<Posting>> postings_;
  VocabStats stats_;
};

inline constexpr uint16_t kIndexFormatVersion = 1;

// Layout: "SFNS", u16 version, u64 body length, body, u32 CRC32C of all
// preceding bytes. The body holds three u64-length-prefixed sections:
// doc table, postings, stats. All integers are little-endian.
std::vector<uint8_t> SerializeIndex(const InvertedIndex& index);
InvertedIndex DeserializeIndex(std::span<const uint8_t> bytes);
void SaveIndex(const InvertedIndex& index, const std::string& path);
InvertedIndex LoadIndex(const std::string& path);

}  // namespace sfns

#endif  // SFNS_INDEX_H_
