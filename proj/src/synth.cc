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

#include "synth.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <set>

#include "error.h"
#include "text.h"

namespace sfns {
namespace {

constexpr std::array<std::pair<TypoOp, std::string_view>, 9> kOpNames = {{
    {TypoOp::kSubstitute, "substitute"},
    {TypoOp::kTransposeChars, "transpose_chars"},
    {TypoOp::kDelete, "delete"},
    {TypoOp::kInsert, "insert"},
    {TypoOp::kSplitWord, "split_word"},
    {TypoOp::kJoinWords, "join_words"},
    {TypoOp::kSwapWordOrder, "swap_word_order"},
    {TypoOp::kCharVariant, "char_variant"},
    {TypoOp::kIncidentalTerm, "incidental_term"},
}};

// Long-word letters avoid h, j, q, w, x, y and c so the two-letter family
// words below mostly segment into pieces of their own.
constexpr std::string_view kOnsets = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::string_view kCodas = "nrsl";

constexpr std::array<std::string_view, 20> kShortWords = {
    "me", "my", "oh", "yo", "we", "xo", "ok", "hi", "by", "ow",
    "eh", "uh", "ya", "ho", "wu", "jo", "hy", "ex", "ax", "qi"};

constexpr std::array<std::string_view, 7> kIncidental = {
    "songs", "music", "lyrics", "live", "remix", "album", "radio"};

constexpr std::array<std::pair<char32_t, char32_t>, 6> kVariants = {{
    {U'a', U'@'}, {U'i', U'!'}, {U's', U'$'},
    {U'o', U'0'}, {U'e', U'3'}, {U'l', U'1'},
}};

constexpr size_t kLongWord = 4;

std::vector<std::u32string> Words(std::string_view text) {
  std::vector<std::u32string> out;
  for (std::string_view w : SplitWords(text)) out.push_back(ToCodePoints(w));
  return out;
}

std::string Join(const std::vector<std::u32string>& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += ToUtf8(words[i]);
  }
  return out;
}

std::vector<size_t> LongWords(const std::vector<std::u32string>& words) {
  std::vector<size_t> out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (words[i].size() >= kLongWord) out.push_back(i);
  }
  return out;
}

template <typename T>
const T& Pick(const std::vector<T>& items, Rng& rng) {
  return items[rng.Uniform(items.size())];
}

char32_t RandomLetter(Rng& rng) {
  return static_cast<char32_t>(U'a' + rng.Uniform(26));
}

std::string RandomWord(Rng& rng) {
  const size_t syllables = rng.Bernoulli(0.6) ? 2 : 3;
  std::string w;
  for (size_t s = 0; s < syllables; ++s) {
    w += kOnsets[rng.Uniform(kOnsets.size())];
    w += kVowels[rng.Uniform(kVowels.size())];
    if (rng.Bernoulli(0.25)) w += kCodas[rng.Uniform(kCodas.size())];
  }
  return w;
}

std::string DayString(size_t day) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "2026-01-%02zu", day + 1);
  return buf;
}

}  // namespace

std::string_view TypoOpName(TypoOp op) {
  for (const auto& [o, name] : kOpNames) {
    if (o == op) return name;
  }
  return "unknown";
}

std::optional<TypoOp> TypoOpFromName(std::string_view name) {
  for (const auto& [o, n] : kOpNames) {
    if (n == name) return o;
  }
  return std::nullopt;
}

TypoSpec TypoSpec::Default() {
  TypoSpec spec;
  spec.ops = {
      {TypoOp::kSubstitute, 0.15},    {TypoOp::kTransposeChars, 0.10},
      {TypoOp::kDelete, 0.10},        {TypoOp::kInsert, 0.10},
      {TypoOp::kSplitWord, 0.05},     {TypoOp::kJoinWords, 0.05},
      {TypoOp::kSwapWordOrder, 0.15}, {TypoOp::kCharVariant, 0.15},
      {TypoOp::kIncidentalTerm, 0.15},
  };
  spec.edits_per_query = {0.8, 0.2};
  return spec;
}

void TypoSpec::Validate() const {
  auto check = [](double sum, bool empty, const char* what) {
    if (empty) throw ValidationError(std::string(what) + " must not be empty");
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError(std::string(what) + " weights must sum to 1");
    }
  };
  double sum = 0.0;
  for (const auto& [_, w] : ops) {
    if (!(w >= 0.0)) throw ValidationError("typo op weights must be >= 0");
    sum += w;
  }
  check(sum, ops.empty(), "typo ops");
  sum = 0.0;
  for (double w : edits_per_query) {
    if (!(w >= 0.0)) throw ValidationError("edit count weights must be >= 0");
    sum += w;
  }
  check(sum, edits_per_query.empty(), "edits_per_query");
}

std::optional<std::string> ApplyTypo(std::string_view name, TypoOp op, Rng& rng) {
  std::vector<std::u32string> words = Words(name);
  const std::vector<size_t> long_words = LongWords(words);
  switch (op) {
    case TypoOp::kSubstitute: {
      if (long_words.empty()) return std::nullopt;
      std::u32string& w = words[Pick(long_words, rng)];
      const size_t p = rng.Uniform(w.size());
      char32_t c;
      do {
        c = RandomLetter(rng);
      } while (c == w[p]);
      w[p] = c;
      break;
    }
    case TypoOp::kTransposeChars: {
      std::vector<std::pair<size_t, size_t>> spots;
      for (size_t i : long_words) {
        for (size_t p = 0; p + 1 < words[i].size(); ++p) {
          if (words[i][p] != words[i][p + 1]) spots.push_back({i, p});
        }
      }
      if (spots.empty()) return std::nullopt;
      const auto [i, p] = Pick(spots, rng);
      std::swap(words[i][p], words[i][p + 1]);
      break;
    }
    case TypoOp::kDelete: {
      if (long_words.empty()) return std::nullopt;
      std::u32string& w = words[Pick(long_words, rng)];
      w.erase(rng.Uniform(w.size()), 1);
      break;
    }
    case TypoOp::kInsert: {
      if (long_words.empty()) return std::nullopt;
      std::u32string& w = words[Pick(long_words, rng)];
      w.insert(w.begin() + static_cast<ptrdiff_t>(rng.Uniform(w.size() + 1)),
               RandomLetter(rng));
      break;
    }
    case TypoOp::kSplitWord: {
      if (long_words.empty()) return std::nullopt;
      const size_t i = Pick(long_words, rng);
      const std::u32string w = words[i];
      const size_t cut = 2 + rng.Uniform(w.size() - 3);
      words[i] = w.substr(0, cut);
      words.insert(words.begin() + static_cast<ptrdiff_t>(i) + 1, w.substr(cut));
      break;
    }
    case TypoOp::kJoinWords: {
      std::vector<size_t> spots;
      for (size_t i = 0; i + 1 < words.size(); ++i) {
        if (words[i].size() >= kLongWord && words[i + 1].size() >= kLongWord) {
          spots.push_back(i);
        }
      }
      if (spots.empty()) return std::nullopt;
      const size_t i = Pick(spots, rng);
      words[i] += words[i + 1];
      words.erase(words.begin() + static_cast<ptrdiff_t>(i) + 1);
      break;
    }
    case TypoOp::kSwapWordOrder: {
      std::vector<size_t> spots;
      for (size_t i = 0; i + 1 < words.size(); ++i) {
        if (words[i] != words[i + 1]) spots.push_back(i);
      }
      if (spots.empty()) return std::nullopt;
      const size_t i = Pick(spots, rng);
      std::swap(words[i], words[i + 1]);
      break;
    }
    case TypoOp::kCharVariant: {
      std::vector<std::pair<size_t, size_t>> spots;
      for (size_t i : long_words) {
        for (size_t p = 0; p < words[i].size(); ++p) {
          for (const auto& [from, _] : kVariants) {
            if (words[i][p] == from) spots.push_back({i, p});
          }
        }
      }
      if (spots.empty()) return std::nullopt;
      const auto [i, p] = Pick(spots, rng);
      for (const auto& [from, to] : kVariants) {
        if (words[i][p] == from) words[i][p] = to;
      }
      break;
    }
    case TypoOp::kIncidentalTerm:
      words.push_back(ToCodePoints(kIncidental[rng.Uniform(kIncidental.size())]));
      break;
  }
  return Join(words);
}

SynthCorpus GenerateSynthCorpus(const SynthConfig& config) {
  config.typo.Validate();
  if (config.n_entities == 0) throw ValidationError("n_entities must be > 0");
  if (config.family_size < 2 || config.family_size > kShortWords.size()) {
    throw ValidationError("family_size must be in [2, " +
                          std::to_string(kShortWords.size()) + "]");
  }
  if (!(config.family_fraction >= 0.0 && config.family_fraction <= 1.0)) {
    throw ValidationError("family_fraction must be in [0, 1]");
  }
  if (config.days < 1 || config.days > 28) {
    throw ValidationError("days must be in [1, 28]");
  }
  Rng rng(config.seed);

  struct Entity {
    std::string name;
    bool family = false;
  };
  std::vector<Entity> entities;
  std::set<std::string> names;
  const size_t families = static_cast<size_t>(
      std::floor(config.family_fraction * static_cast<double>(config.n_entities) /
                 static_cast<double>(config.family_size)));
  for (size_t f = 0; f < families; ++f) {
    const std::string a = RandomWord(rng);
    const std::string b = RandomWord(rng);
    const size_t slot = rng.Uniform(3);
    std::vector<std::string_view> shorts(kShortWords.begin(), kShortWords.end());
    rng.Shuffle(shorts);
    for (size_t m = 0; m < config.family_size; ++m) {
      const std::string s(shorts[m]);
      std::string name = slot == 0   ? s + " " + a + " " + b
                         : slot == 1 ? a + " " + s + " " + b
                                     : a + " " + b + " " + s;
      if (names.insert(name).second) entities.push_back({name, true});
    }
  }
  while (entities.size() < config.n_entities) {
    std::string name = RandomWord(rng) + " " + RandomWord(rng);
    if (rng.Bernoulli(0.3)) name += " " + RandomWord(rng);
    if (names.insert(name).second) entities.push_back({name, false});
  }
  rng.Shuffle(entities);

  std::vector<double> op_weights;
  for (const auto& [_, w] : config.typo.ops) op_weights.push_back(w);

  SynthCorpus out;
  for (size_t e = 0; e < entities.size(); ++e) {
    char id[32];
    std::snprintf(id, sizeof(id), "e%05zu", e);
    out.docs.push_back({id, entities[e].name, ""});
  }
  for (size_t e = 0; e < entities.size(); ++e) {
    const std::string& id = out.docs[e].id;
    const std::string& name = entities[e].name;
    out.log.push_back({name, id, static_cast<int64_t>(5 + rng.Uniform(26)),
                       DayString(rng.Uniform(config.days))});
    std::set<std::string> used = {name};
    for (size_t q = 0; q < config.queries_per_entity; ++q) {
      for (int attempt = 0; attempt < 50; ++attempt) {
        const size_t edits = 1 + rng.Categorical(config.typo.edits_per_query);
        std::vector<TypoOp> ops;
        std::optional<std::string> text = name;
        for (size_t k = 0; k < edits && text; ++k) {
          ops.push_back(config.typo.ops[rng.Categorical(op_weights)].first);
          text = ApplyTypo(*text, ops.back(), rng);
        }
        if (!text) continue;
        *text = Normalize(*text);
        if (!used.insert(*text).second) continue;

        std::string slice;
        const bool swapped =
            std::find(ops.begin(), ops.end(), TypoOp::kSwapWordOrder) != ops.end();
        if (swapped) {
          slice = "transposition";
        } else if (entities[e].family) {
          slice = "short_word";
        } else if (ops.front() == TypoOp::kCharVariant) {
          slice = "character_variation";
        } else if (ops.front() == TypoOp::kIncidentalTerm) {
          slice = "incidental_terms";
        } else {
          slice = "misspelling";
        }
        out.queries.push_back({*text, id, slice, ops});
        out.qrels[*text].insert(id);
        const std::string day = DayString(rng.Uniform(config.days));
        out.log.push_back({*text, id, static_cast<int64_t>(4 + rng.Uniform(9)), day});
        // Low-engagement noise pointing at an unrelated entity.
        if (rng.Bernoulli(0.1)) {
          const std::string& other = out.docs[rng.Uniform(out.docs.size())].id;
          if (other != id) {
            out.log.push_back({*text, other,
                               static_cast<int64_t>(1 + rng.Uniform(3)), day});
          }
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace sfns
