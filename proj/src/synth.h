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

// Seeded synthetic catalog with typo'd queries, relevance judgments and a
// behavior log.
//
// Entity names are built from syllables. Part of the catalog comes in
// families: every member shares the same long words and differs only in one
// two-letter word ("me", "oh", ...), which is what makes short terms matter.

#ifndef SFNS_SYNTH_H_
#define SFNS_SYNTH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eval.h"
#include "mining.h"
#include "random.h"
#include "retrieval.h"

namespace sfns {

enum class TypoOp {
  kSubstitute,
  kTransposeChars,
  kDelete,
  kInsert,
  kSplitWord,
  kJoinWords,
  kSwapWordOrder,
  kCharVariant,     // a -> @, i -> !, s -> $, o -> 0, e -> 3, l -> 1
  kIncidentalTerm,  // trailing "songs", "live", ...
};

std::string_view TypoOpName(TypoOp op);
std::optional<TypoOp> TypoOpFromName(std::string_view name);

struct TypoSpec {
  std::vector<std::pair<TypoOp, double>> ops;
  // edits_per_query[i] is the probability of applying i + 1 edits.
  std::vector<double> edits_per_query;

  static TypoSpec Default();
  // Weights must be non-negative and each list must sum to 1.
  void Validate() const;
};

// Applies one edit to a normalized name. Character edits only touch words of
// four or more characters. Returns nullopt when the op does not apply.
std::optional<std::string> ApplyTypo(std::string_view name, TypoOp op, Rng& rng);

struct SynthConfig {
  uint64_t seed = 7;
  size_t n_entities = 600;
  size_t queries_per_entity = 4;
  // Share of entities that belong to short-word families.
  double family_fraction = 0.5;
  size_t family_size = 15;
  size_t days = 7;
  TypoSpec typo = TypoSpec::Default();
};

struct SynthQuery {
  std::string text;
  std::string entity;
  // misspelling, character_variation, transposition, incidental_terms or
  // short_word (family members, unless the word order was swapped).
  std::string slice;
  std::vector<TypoOp> ops;
};

struct SynthCorpus {
  std::vector<TextDoc> docs;  // id = entity id, text = canonical name
  std::vector<SynthQuery> queries;
  Qrels qrels;
  std::vector<LogRecord> log;
};

SynthCorpus GenerateSynthCorpus(const SynthConfig& config);

}  // namespace sfns

#endif  // SFNS_SYNTH_H_
