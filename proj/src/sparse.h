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

// Sparse vectors over the token vocabulary, corpus statistics, IDF query
// weighting and binary16 weight quantization.

#ifndef SFNS_SPARSE_H_
#define SFNS_SPARSE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfns {

using TokenId = uint32_t;

class TokenizerModel;

struct SparseEntry {
  TokenId token = 0;
  double weight = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

// Entries are sorted by token id, unique, and strictly positive.
class SparseVector {
 public:
  SparseVector() = default;

  // Sorts, merges duplicate ids by max and drops zero weights. Negative or
  // non-finite weights are rejected.
  explicit SparseVector(std::vector<SparseEntry> entries);

  std::span<const SparseEntry> entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // 0 for ids outside the support.
  double WeightOf(TokenId token) const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<SparseEntry> entries_;
};

double DotScore(const SparseVector& a, const SparseVector& b);

// `token_id:weight` pairs separated by spaces, 9 significant digits.
std::string ToText(const SparseVector& vector);
SparseVector SparseVectorFromText(std::string_view line);

class VocabStats {
 public:
  VocabStats() = default;
  VocabStats(uint64_t doc_count, std::map<TokenId, uint64_t> doc_freq);

  // Counts, for every token, the vectors whose support contains it.
  static VocabStats FromVectors(std::span<const SparseVector> vectors);

  uint64_t doc_count() const { return doc_count_; }
  uint64_t DocFreq(TokenId token) const;
  const std::map<TokenId, uint64_t>& doc_freq() const { return doc_freq_; }

  bool operator==(const VocabStats&) const = default;

 private:
  uint64_t doc_count_ = 0;
  std::map<TokenId, uint64_t> doc_freq_;
};

// ln((N + 1) / (df + 1)) + 1. Tokens never seen get df = 0.
double Idf(const VocabStats& stats, TokenId token);

// Header `N=<doc_count>` then one `token_id<TAB>df` line per token.
std::string ToText(const VocabStats& stats);
VocabStats VocabStatsFromText(std::string_view text);

enum class QueryWeighting {
  kIdf,        // indicator times IDF
  kIndicator,  // 1.0 per distinct token
};

// Builds the query vector from already segmented tokens. Ids at or beyond
// `vocab_size` (the tokenizer's unknown id) are dropped; repeats collapse.
SparseVector QueryVectorFromTokens(std::span<const TokenId> tokens,
                                   size_t vocab_size, const VocabStats& stats,
                                   QueryWeighting weighting = QueryWeighting::kIdf);

// Inference-free query encoding: normalize, segment, weight by IDF.
SparseVector EncodeQuery(const TokenizerModel& tokenizer,
                         const VocabStats& stats, std::string_view text,
                         QueryWeighting weighting = QueryWeighting::kIdf);

// IEEE 754 binary16 bit pattern of a stored document weight.
struct QuantizedWeight {
  uint16_t bits = 0;

  bool operator==(const QuantizedWeight&) const = default;
};

// Round-to-nearest-even. Rejects negative, non-finite, and values that
// would round past the largest finite binary16 (65504).
QuantizedWeight Quantize(double weight);
double Dequantize(QuantizedWeight q);

// Quantize every weight and read it back; entries rounding to zero vanish.
SparseVector QuantizeRoundTrip(const SparseVector& vector);

}  // namespace sfns

#endif  // SFNS_SPARSE_H_
