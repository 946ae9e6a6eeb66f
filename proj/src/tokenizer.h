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

// Granular unigram subword tokenizer with a hard piece-length ceiling, and
// the character trigram analyzer used by the baseline retriever.

#ifndef SFNS_TOKENIZER_H_
#define SFNS_TOKENIZER_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sparse.h"

namespace sfns {

inline constexpr int kDefaultMaxPieceLen = 3;
inline constexpr size_t kProductionVocabSize = 32000;

struct Piece {
  std::u32string text;
  double log_prob = 0.0;

  bool operator==(const Piece&) const = default;
};

// Token ids are piece positions. Id size() is reserved for characters that
// have no piece; it never appears in retrieval vectors.
class TokenizerModel {
 public:
  TokenizerModel(std::vector<Piece> pieces, int max_piece_len);

  size_t size() const { return pieces_.size(); }
  TokenId unk_id() const { return static_cast<TokenId>(pieces_.size()); }
  int max_piece_len() const { return max_piece_len_; }
  std::span<const Piece> pieces() const { return pieces_; }
  const Piece& piece(TokenId id) const { return pieces_.at(id); }
  std::string PieceUtf8(TokenId id) const;

  std::optional<TokenId> Find(std::u32string_view piece) const;
  std::optional<TokenId> FindUtf8(std::string_view piece) const;

  // Score of an unknown-character node in the segmentation lattice.
  double unk_log_prob() const { return unk_log_prob_; }

  bool operator==(const TokenizerModel& other) const {
    return pieces_ == other.pieces_ && max_piece_len_ == other.max_piece_len_;
  }

 private:
  std::vector<Piece> pieces_;
  std::unordered_map<std::u32string, TokenId> index_;
  int max_piece_len_;
  double unk_log_prob_;
};

struct UnigramTrainerConfig {
  size_t vocab_size = 2000;
  int max_piece_len = kDefaultMaxPieceLen;
  double shrink_factor = 0.75;
  int em_iters = 2;
  // Seed vocabulary is capped at this multiple of vocab_size.
  size_t seed_cap_multiplier = 100;
};

// Lines are normalized and split into words before training.
TokenizerModel TrainUnigram(std::span<const std::string> corpus,
                            const UnigramTrainerConfig& config);

// Viterbi segmentation of normalized text, word by word. Ties on score go
// to fewer pieces, then to the lexicographically smallest piece sequence.
std::vector<TokenId> Segment(const TokenizerModel& model,
                             std::string_view normalized);
std::vector<TokenId> SegmentWord(const TokenizerModel& model,
                                 std::u32string_view word);

// Sum of piece log-probs (unknown nodes use unk_log_prob()).
double SegmentationScore(const TokenizerModel& model,
                         std::span<const TokenId> tokens);

// Contiguous 3-character substrings per word; shorter words emit nothing.
std::vector<std::string> Trigrams(std::string_view normalized);

// TSV: `#unigram max_len=<n> vocab=<k>` then `piece<TAB>log_prob` rows.
std::string SerializeTokenizer(const TokenizerModel& model);
TokenizerModel ParseTokenizer(std::string_view text);
void SaveTokenizer(const TokenizerModel& model, const std::string& path);
TokenizerModel LoadTokenizer(const std::string& path);

}  // namespace sfns

#endif  // SFNS_TOKENIZER_H_
