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

#include "sparse.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "error.h"
#include "text.h"
#include "tokenizer.h"

namespace sfns {

SparseVector::SparseVector(std::vector<SparseEntry> entries) {
  for (const SparseEntry& e : entries) {
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw ValidationError("sparse weight for token " +
                            std::to_string(e.token) +
                            " must be finite and non-negative");
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.token < b.token;
            });
  entries_.reserve(entries.size());
  for (const SparseEntry& e : entries) {
    if (!entries_.empty() && entries_.back().token == e.token) {
      entries_.back().weight = std::max(entries_.back().weight, e.weight);
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const SparseEntry& e) { return e.weight == 0.0; });
}

double SparseVector::WeightOf(TokenId token) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), token,
      [](const SparseEntry& e, TokenId t) { return e.token < t; });
  return (it != entries_.end() && it->token == token) ? it->weight : 0.0;
}

double DotScore(const SparseVector& a, const SparseVector& b) {
  auto ea = a.entries();
  auto eb = b.entries();
  double sum = 0.0;
  size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].token == eb[j].token) {
      sum += ea[i].weight * eb[j].weight;
      ++i;
      ++j;
    } else if (ea[i].token < eb[j].token) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

std::string ToText(const SparseVector& vector) {
  std::string out;
  char buf[64];
  for (const SparseEntry& e : vector.entries()) {
    if (!out.empty()) out.push_back(' ');
    std::snprintf(buf, sizeof(buf), "%u:%.9g", e.token, e.weight);
    out += buf;
  }
  return out;
}

SparseVector SparseVectorFromText(std::string_view line) {
  std::vector<SparseEntry> entries;
  for (std::string_view field : SplitWords(line)) {
    const size_t colon = field.find(':');
    if (colon == std::string_view::npos) {
      throw FormatError("sparse entry without ':' in '" + std::string(field) +
                        "'");
    }
    SparseEntry e;
    auto [p, ec] = std::from_chars(field.data(), field.data() + colon, e.token);
    if (ec != std::errc() || p != field.data() + colon) {
      throw FormatError("bad token id in '" + std::string(field) + "'");
    }
    const std::string weight(field.substr(colon + 1));
    char* end = nullptr;
    e.weight = std::strtod(weight.c_str(), &end);
    if (weight.empty() || *end != '\0') {
      throw FormatError("bad weight in '" + std::string(field) + "'");
    }
    entries.push_back(e);
  }
  return SparseVector(std::move(entries));
}

VocabStats::VocabStats(uint64_t doc_count, std::map<TokenId, uint64_t> doc_freq)
    : doc_count_(doc_count), doc_freq_(std::move(doc_freq)) {
  for (const auto& [token, df] : doc_freq_) {
    if (df > doc_count_) {
      throw ValidationError("doc_freq of token " + std::to_string(token) +
                            " exceeds doc_count");
    }
  }
  std::erase_if(doc_freq_, [](const auto& kv) { return kv.second == 0; });
}

VocabStats VocabStats::FromVectors(std::span<const SparseVector> vectors) {
  std::map<TokenId, uint64_t> df;
  for (const SparseVector& v : vectors) {
    for (const SparseEntry& e : v.entries()) ++df[e.token];
  }
  return VocabStats(vectors.size(), std::move(df));
}

uint64_t VocabStats::DocFreq(TokenId token) const {
  auto it = doc_freq_.find(token);
  return it == doc_freq_.end() ? 0 : it->second;
}

double Idf(const VocabStats& stats, TokenId token) {
  const double n = static_cast<double>(stats.doc_count());
  const double df = static_cast<double>(stats.DocFreq(token));
  return std::log((n + 1.0) / (df + 1.0)) + 1.0;
}

std::string ToText(const VocabStats& stats) {
  std::string out = "N=" + std::to_string(stats.doc_count()) + "\n";
  for (const auto& [token, df] : stats.doc_freq()) {
    out += std::to_string(token) + "\t" + std::to_string(df) + "\n";
  }
  return out;
}

VocabStats VocabStatsFromText(std::string_view text) {
  auto parse_u64 = [](std::string_view s, const char* what) {
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw FormatError(std::string("bad ") + what + " '" + std::string(s) +
                        "'");
    }
    return v;
  };
  size_t pos = text.find('\n');
  std::string_view header = text.substr(0, pos);
  if (header.substr(0, 2) != "N=") {
    throw FormatError("vocab stats must start with 'N=<doc_count>'");
  }
  const uint64_t n = parse_u64(header.substr(2), "doc_count");
  std::map<TokenId, uint64_t> df;
  while (pos != std::string_view::npos && pos + 1 < text.size()) {
    const size_t next = text.find('\n', pos + 1);
    std::string_view line = text.substr(pos + 1, next - pos - 1);
    pos = next;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw FormatError("vocab stats line without tab: '" + std::string(line) +
                        "'");
    }
    const uint64_t token = parse_u64(line.substr(0, tab), "token id");
    if (token > UINT32_MAX) throw FormatError("token id out of range");
    df[static_cast<TokenId>(token)] = parse_u64(line.substr(tab + 1), "df");
  }
  return VocabStats(n, std::move(df));
}

SparseVector QueryVectorFromTokens(std::span<const TokenId> tokens,
                                   size_t vocab_size, const VocabStats& stats,
                                   QueryWeighting weighting) {
  std::set<TokenId> distinct;
  for (TokenId t : tokens) {
    if (t < vocab_size) distinct.insert(t);
  }
  std::vector<SparseEntry> entries;
  entries.reserve(distinct.size());
  for (TokenId t : distinct) {
    entries.push_back(
        {t, weighting == QueryWeighting::kIdf ? Idf(stats, t) : 1.0});
  }
  return SparseVector(std::move(entries));
}

SparseVector EncodeQuery(const TokenizerModel& tokenizer,
                         const VocabStats& stats, std::string_view text,
                         QueryWeighting weighting) {
  const std::string normalized = Normalize(text);
  if (normalized.empty()) return SparseVector();
  const std::vector<TokenId> tokens = Segment(tokenizer, normalized);
  return QueryVectorFromTokens(tokens, tokenizer.size(), stats, weighting);
}

QuantizedWeight Quantize(double weight) {
  if (!std::isfinite(weight) || weight < 0.0) {
    throw ValidationError("cannot quantize weight " + std::to_string(weight) +
                          ": must be finite and non-negative");
  }
  if (weight == 0.0) return QuantizedWeight{0};

  // weight = 1.m * 2^exp. Scaling by powers of two is exact in double, so
  // nearbyint performs the single round-to-nearest-even step.
  const int exp = std::ilogb(weight);
  if (exp < -14) {
    // Subnormal range: units of 2^-24. A result of 1024 is the smallest
    // normal, whose bit pattern is also 1024.
    const double units = std::nearbyint(std::ldexp(weight, 24));
    return QuantizedWeight{static_cast<uint16_t>(units)};
  }
  double mantissa = std::nearbyint(std::ldexp(weight, 10 - exp));
  int biased = exp + 15;
  if (mantissa == 2048.0) {
    mantissa = 1024.0;
    ++biased;
  }
  if (biased > 30) {
    throw ValidationError("weight " + std::to_string(weight) +
                          " overflows binary16");
  }
  return QuantizedWeight{static_cast<uint16_t>(
      (biased << 10) | (static_cast<int>(mantissa) - 1024))};
}

double Dequantize(QuantizedWeight q) {
  const int exponent = (q.bits >> 10) & 0x1F;
  const int fraction = q.bits & 0x3FF;
  double magnitude;
  if (exponent == 0) {
    magnitude = std::ldexp(static_cast<double>(fraction), -24);
  } else if (exponent == 31) {
    magnitude = fraction == 0 ? INFINITY : NAN;
  } else {
    magnitude = std::ldexp(static_cast<double>(1024 + fraction), exponent - 25);
  }
  return (q.bits & 0x8000) ? -magnitude : magnitude;
}

SparseVector QuantizeRoundTrip(const SparseVector& vector) {
  std::vector<SparseEntry> entries;
  entries.reserve(vector.size());
  for (const SparseEntry& e : vector.entries()) {
    entries.push_back({e.token, Dequantize(Quantize(e.weight))});
  }
  return SparseVector(std::move(entries));
}

}  // namespace sfns
