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

// Text normalization and UTF-8 <-> code point helpers.

#ifndef SFNS_TEXT_H_
#define SFNS_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace sfns {

// NFKC, lowercase, whitespace runs collapsed to a single ASCII space and
// trimmed. Punctuation is kept as-is.
std::string Normalize(std::string_view text);

// Invalid UTF-8 sequences decode to U+FFFD.
std::u32string ToCodePoints(std::string_view utf8);
std::string ToUtf8(std::u32string_view code_points);

// Splits already-normalized text on ' '. Empty words are skipped.
std::vector<std::string_view> SplitWords(std::string_view normalized);

// Length in Unicode scalar values.
size_t CodePointLength(std::string_view utf8);

}  // namespace sfns

#endif  // SFNS_TEXT_H_
