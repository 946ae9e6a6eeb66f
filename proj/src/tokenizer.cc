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

#include "tokenizer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "error.h"
#include "io.h"
#include "text.h"

namespace sfns {
namespace {

constexpr double kUnkPenalty = 10.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Multi-character pieces whose expected count falls below this are dropped
// after each M-step.
constexpr double kExpectedCountThreshold = 0.5;
constexpr double kMinCharCount = 1e-6;
constexpr double kScoreTieEpsilon = 1e-9;

double LogSumExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Mutable vocabulary used while training.
struct WorkingVocab {
  std::vector<std::u32string> pieces;
  std::vector<double> log_probs;
  std::unordered_map<std::u32string, size_t> index;

  void Reindex() {
    index.clear();
    for (size_t i = 0; i < pieces.size(); ++i) index.emplace(pieces[i], i);
  }
};

struct Span {
  uint32_t begin;
  uint32_t end;
  size_t piece;
};

std::vector<Span> LatticeSpans(const WorkingVocab& vocab,
                               std::u32string_view word, int max_len,
                               std::u32string_view excluded = {}) {
  std::vector<Span> spans;
  for (size_t i = 0; i < word.size(); ++i) {
    const size_t limit = std::min<size_t>(max_len, word.size() - i);
    for (size_t len = 1; len <= limit; ++len) {
      std::u32string_view sub = word.substr(i, len);
      if (!excluded.empty() && sub == excluded) continue;
      auto it = vocab.index.find(std::u32string(sub));
      if (it != vocab.index.end()) {
        spans.push_back({static_cast<uint32_t>(i),
                         static_cast<uint32_t>(i + len), it->second});
      }
    }
  }
  return spans;
}

// Best-scoring covering by forward dynamic programming; empty when the word
// cannot be covered.
std::vector<size_t> TrainingViterbi(const WorkingVocab& vocab,
                                    std::u32string_view word, int max_len,
                                    std::u32string_view excluded = {}) {
  const size_t n = word.size();
  std::vector<double> best(n + 1, kNegInf);
  std::vector<const Span*> back(n + 1, nullptr);
  best[0] = 0.0;
  const std::vector<Span> spans = LatticeSpans(vocab, word, max_len, excluded);
  // Spans are generated in increasing begin order, which is a valid
  // topological order for the forward pass.
  for (const Span& s : spans) {
    if (best[s.begin] == kNegInf) continue;
    const double score = best[s.begin] + vocab.log_probs[s.piece];
    if (score > best[s.end]) {
      best[s.end] = score;
      back[s.end] = &s;
    }
  }
  std::vector<size_t> path;
  if (best[n] == kNegInf) return path;
  for (size_t pos = n; pos > 0; pos = back[pos]->begin) {
    path.push_back(back[pos]->piece);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

struct WordCount {
  std::u32string word;
  double count;
};

// Returns expected piece counts under the current model.
std::vector<double> ExpectationStep(const WorkingVocab& vocab,
                                    std::span<const WordCount> words,
                                    int max_len) {
  std::vector<double> expected(vocab.pieces.size(), 0.0);
  std::vector<double> alpha, beta;
  for (const WordCount& wc : words) {
    const size_t n = wc.word.size();
    const std::vector<Span> spans = LatticeSpans(vocab, wc.word, max_len);
    alpha.assign(n + 1, kNegInf);
    beta.assign(n + 1, kNegInf);
    alpha[0] = 0.0;
    beta[n] = 0.0;
    for (const Span& s : spans) {
      alpha[s.end] =
          LogSumExp(alpha[s.end], alpha[s.begin] + vocab.log_probs[s.piece]);
    }
    for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
      beta[it->begin] =
          LogSumExp(beta[it->begin], vocab.log_probs[it->piece] + beta[it->end]);
    }
    const double z = alpha[n];
    if (z == kNegInf) continue;
    for (const Span& s : spans) {
      const double log_marginal =
          alpha[s.begin] + vocab.log_probs[s.piece] + beta[s.end] - z;
      expected[s.piece] += wc.count * std::exp(log_marginal);
    }
  }
  return expected;
}

// Re-estimates log-probs and drops rarely used multi-character pieces.
void MaximizationStep(WorkingVocab& vocab, const std::vector<double>& expected) {
  WorkingVocab next;
  std::vector<double> counts;
  for (size_t i = 0; i < vocab.pieces.size(); ++i) {
    const bool is_char = vocab.pieces[i].size() == 1;
    if (!is_char && expected[i] < kExpectedCountThreshold) continue;
    next.pieces.push_back(vocab.pieces[i]);
    counts.push_back(is_char ? std::max(expected[i], kMinCharCount)
                             : expected[i]);
  }
  double total = 0.0;
  for (double c : counts) total += c;
  for (double c : counts) next.log_probs.push_back(std::log(c / total));
  next.Reindex();
  vocab = std::move(next);
}

// Keeps single characters plus the multi-character pieces whose removal
// would cost the most likelihood, up to `target` pieces in total.
void Prune(WorkingVocab& vocab, std::span<const WordCount> words, int max_len,
           size_t target) {
  const size_t v = vocab.pieces.size();
  std::vector<double> freq(v, 0.0);
  std::vector<double> inverted_mass(v, 0.0);
  double word_mass = 0.0;
  for (const WordCount& wc : words) {
    word_mass += wc.count;
    std::set<size_t> used;
    for (size_t p : TrainingViterbi(vocab, wc.word, max_len)) {
      freq[p] += wc.count;
      used.insert(p);
    }
    for (size_t p : used) inverted_mass[p] += wc.count;
  }
  double sum = 0.0;
  for (double f : freq) sum += f;
  const double log_sum = std::log(sum);

  std::vector<std::pair<double, size_t>> candidates;
  std::vector<size_t> keep;
  for (size_t i = 0; i < v; ++i) {
    if (vocab.pieces[i].size() == 1) {
      keep.push_back(i);
      continue;
    }
    // Pieces absent from every best path can go without any loss.
    if (freq[i] == 0.0) continue;
    const std::vector<size_t> alternatives =
        TrainingViterbi(vocab, vocab.pieces[i], max_len, vocab.pieces[i]);
    const double log_prob_piece = std::log(freq[i]) - log_sum;
    const double alt_sum =
        sum + freq[i] * (static_cast<double>(alternatives.size()) - 1.0);
    const double log_alt_sum = std::log(alt_sum);
    double log_prob_alt = 0.0;
    for (size_t a : alternatives) {
      log_prob_alt += std::log(freq[a] + freq[i]) - log_alt_sum;
    }
    const double share = inverted_mass[i] / word_mass;
    candidates.emplace_back(share * (log_prob_piece - log_prob_alt), i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return vocab.pieces[a.second] < vocab.pieces[b.second];
                   });
  for (const auto& [loss, i] : candidates) {
    if (keep.size() >= target) break;
    keep.push_back(i);
  }
  std::sort(keep.begin(), keep.end());
  WorkingVocab next;
  for (size_t i : keep) {
    next.pieces.push_back(vocab.pieces[i]);
    next.log_probs.push_back(vocab.log_probs[i]);
  }
  next.Reindex();
  vocab = std::move(next);
}

}  // namespace

TokenizerModel::TokenizerModel(std::vector<Piece> pieces, int max_piece_len)
    : pieces_(std::move(pieces)), max_piece_len_(max_piece_len) {
  if (max_piece_len_ < 1) throw ValidationError("max_piece_len must be >= 1");
  double min_log_prob = 0.0;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (p.text.empty()) throw ValidationError("empty piece at id " + std::to_string(i));
    if (p.text.size() > static_cast<size_t>(max_piece_len_)) {
      throw ValidationError("piece '" + ToUtf8(p.text) + "' exceeds " +
                            std::to_string(max_piece_len_) + " characters");
    }
    if (!std::isfinite(p.log_prob) || p.log_prob > 0.0) {
      throw ValidationError("piece '" + ToUtf8(p.text) +
                            "' has invalid log_prob");
    }
    if (!index_.emplace(p.text, static_cast<TokenId>(i)).second) {
      throw ValidationError("duplicate piece '" + ToUtf8(p.text) + "'");
    }
    min_log_prob = std::min(min_log_prob, p.log_prob);
  }
  unk_log_prob_ = min_log_prob - kUnkPenalty;
}

std::string TokenizerModel::PieceUtf8(TokenId id) const {
  return ToUtf8(piece(id).text);
}

std::optional<TokenId> TokenizerModel::Find(std::u32string_view piece) const {
  auto it = index_.find(std::u32string(piece));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenId> TokenizerModel::FindUtf8(std::string_view piece) const {
  return Find(ToCodePoints(piece));
}

TokenizerModel TrainUnigram(std::span<const std::string> corpus,
                            const UnigramTrainerConfig& config) {
  if (config.max_piece_len < 1) throw ValidationError("max_piece_len must be >= 1");
  if (config.vocab_size < 1) throw ValidationError("vocab_size must be >= 1");
  if (!(config.shrink_factor > 0.0 && config.shrink_factor < 1.0)) {
    throw ValidationError("shrink_factor must be in (0, 1)");
  }
  if (config.em_iters < 1) throw ValidationError("em_iters must be >= 1");

  std::map<std::u32string, double> word_counts;
  for (const std::string& line : corpus) {
    const std::string normalized = Normalize(line);
    for (std::string_view w : SplitWords(normalized)) {
      word_counts[ToCodePoints(w)] += 1.0;
    }
  }
  if (word_counts.empty()) throw ValidationError("training corpus is empty");
  std::vector<WordCount> words;
  words.reserve(word_counts.size());
  for (auto& [w, c] : word_counts) words.push_back({w, c});

  // Seed: every substring up to the ceiling, scored by frequency x length.
  const int max_len = config.max_piece_len;
  std::map<std::u32string, double> substring_freq;
  for (const WordCount& wc : words) {
    for (size_t i = 0; i < wc.word.size(); ++i) {
      const size_t limit = std::min<size_t>(max_len, wc.word.size() - i);
      for (size_t len = 1; len <= limit; ++len) {
        substring_freq[wc.word.substr(i, len)] += wc.count;
      }
    }
  }
  std::vector<std::pair<double, std::u32string>> multi;
  WorkingVocab vocab;
  for (auto& [s, f] : substring_freq) {
    const double score = f * static_cast<double>(s.size());
    if (s.size() == 1) {
      vocab.pieces.push_back(s);
      vocab.log_probs.push_back(score);
    } else {
      multi.emplace_back(score, s);
    }
  }
  const size_t alphabet = vocab.pieces.size();
  if (config.vocab_size < alphabet) {
    throw ValidationError("vocab_size " + std::to_string(config.vocab_size) +
                          " is smaller than the alphabet size " +
                          std::to_string(alphabet));
  }
  std::stable_sort(multi.begin(), multi.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const size_t seed_cap = config.seed_cap_multiplier * config.vocab_size;
  for (auto& [score, s] : multi) {
    if (vocab.pieces.size() >= seed_cap) break;
    vocab.pieces.push_back(std::move(s));
    vocab.log_probs.push_back(score);
  }
  double total = 0.0;
  for (double s : vocab.log_probs) total += s;
  for (double& s : vocab.log_probs) s = std::log(s / total);
  vocab.Reindex();

  while (true) {
    for (int it = 0; it < config.em_iters; ++it) {
      MaximizationStep(vocab, ExpectationStep(vocab, words, max_len));
    }
    if (vocab.pieces.size() <= config.vocab_size) break;
    const size_t shrunk = static_cast<size_t>(
        config.shrink_factor * static_cast<double>(vocab.pieces.size()));
    Prune(vocab, words, max_len, std::max(config.vocab_size, shrunk));
  }

  std::vector<Piece> pieces;
  for (size_t i = 0; i < vocab.pieces.size(); ++i) {
    pieces.push_back({vocab.pieces[i], std::min(0.0, vocab.log_probs[i])});
  }
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const Piece& a, const Piece& b) {
                     if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                     return a.text < b.text;
                   });
  return TokenizerModel(std::move(pieces), max_len);
}

std::vector<TokenId> SegmentWord(const TokenizerModel& model,
                                 std::u32string_view word) {
  // Backward pass so that the lexicographic tie-break only has to compare
  // first pieces: equal first pieces share the same optimal suffix.
  const size_t n = word.size();
  struct Cell {
    double score = kNegInf;
    size_t count = 0;
    size_t len = 0;
    TokenId id = 0;
  };
  std::vector<Cell> best(n + 1);
  best[n].score = 0.0;
  const size_t max_len = static_cast<size_t>(model.max_piece_len());
  for (size_t i = n; i-- > 0;) {
    Cell& cell = best[i];
    const size_t limit = std::min(max_len, n - i);
    for (size_t len = 1; len <= limit; ++len) {
      const Cell& rest = best[i + len];
      if (rest.score == kNegInf) continue;
      std::u32string_view sub = word.substr(i, len);
      std::optional<TokenId> id = model.Find(sub);
      double log_prob;
      if (id) {
        log_prob = model.piece(*id).log_prob;
      } else if (len == 1) {
        id = model.unk_id();
        log_prob = model.unk_log_prob();
      } else {
        continue;
      }
      const double score = log_prob + rest.score;
      const size_t count = rest.count + 1;
      bool better;
      if (cell.score == kNegInf || score > cell.score + kScoreTieEpsilon) {
        better = true;
      } else if (score < cell.score - kScoreTieEpsilon) {
        better = false;
      } else if (count != cell.count) {
        better = count < cell.count;
      } else {
        better = sub < word.substr(i, cell.len);
      }
      if (better) cell = {score, count, len, *id};
    }
  }
  std::vector<TokenId> out;
  for (size_t pos = 0; pos < n; pos += best[pos].len) out.push_back(best[pos].id);
  return out;
}

std::vector<TokenId> Segment(const TokenizerModel& model,
                             std::string_view normalized) {
  std::vector<TokenId> out;
  for (std::string_view w : SplitWords(normalized)) {
    const std::vector<TokenId> ids = SegmentWord(model, ToCodePoints(w));
    out.insert(out.end(), ids.begin(), ids.end());
  }
  return out;
}

double SegmentationScore(const TokenizerModel& model,
                         std::span<const TokenId> tokens) {
  double score = 0.0;
  for (TokenId t : tokens) {
    score += t < model.size() ? model.piece(t).log_prob : model.unk_log_prob();
  }
  return score;
}

std::vector<std::string> Trigrams(std::string_view normalized) {
  std::vector<std::string> out;
  for (std::string_view w : SplitWords(normalized)) {
    const std::u32string cps = ToCodePoints(w);
    for (size_t i = 0; i + 3 <= cps.size(); ++i) {
      out.push_back(ToUtf8(std::u32string_view(cps).substr(i, 3)));
    }
  }
  return out;
}

std::string SerializeTokenizer(const TokenizerModel& model) {
  std::string out = "#unigram max_len=" + std::to_string(model.max_piece_len()) +
                    " vocab=" + std::to_string(model.size()) + "\n";
  char buf[64];
  for (const Piece& p : model.pieces()) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.log_prob);
    out += ToUtf8(p.text);
    out += '\t';
    out += buf;
    out += '\n';
  }
  return out;
}

TokenizerModel ParseTokenizer(std::string_view text) {
  size_t pos = text.find('\n');
  const std::string header(text.substr(0, pos));
  int max_len = 0;
  size_t vocab = 0;
  if (std::sscanf(header.c_str(), "#unigram max_len=%d vocab=%zu", &max_len,
                  &vocab) != 2) {
    throw FormatError("tokenizer model header must be "
                      "'#unigram max_len=<n> vocab=<k>'");
  }
  std::vector<Piece> pieces;
  size_t line_no = 1;
  while (pos != std::string_view::npos && pos + 1 < text.size()) {
    const size_t next = text.find('\n', pos + 1);
    std::string_view line = text.substr(pos + 1, next - pos - 1);
    pos = next;
    ++line_no;
    if (line.empty()) continue;
    const size_t tab = line.rfind('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw FormatError("tokenizer model line " + std::to_string(line_no) +
                        ": expected 'piece<TAB>log_prob'");
    }
    const std::string value(line.substr(tab + 1));
    char* end = nullptr;
    const double log_prob = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0') {
      throw FormatError("tokenizer model line " + std::to_string(line_no) +
                        ": bad log_prob '" + value + "'");
    }
    pieces.push_back({ToCodePoints(line.substr(0, tab)), log_prob});
  }
  if (pieces.size() != vocab) {
    throw FormatError("tokenizer model header declares " +
                      std::to_string(vocab) + " pieces but file has " +
                      std::to_string(pieces.size()));
  }
  return TokenizerModel(std::move(pieces), max_len);
}

void SaveTokenizer(const TokenizerModel& model, const std::string& path) {
  WriteFile(path, SerializeTokenizer(model));
}

TokenizerModel LoadTokenizer(const std::string& path) {
  return ParseTokenizer(ReadFile(path));
}

}  // namespace sfns
