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

#include "index.h"

#include <algorithm>
#include <unordered_set>

#include "error.h"
#include "io.h"

namespace sfns {
namespace {

constexpr char kMagic[4] = {'S', 'F', 'N', 'S'};
constexpr size_t kHeaderSize = 4 + 2 + 8;

bool HitBefore(const SearchHit& a, const SearchHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc < b.doc;
}

}  // namespace

InvertedIndex InvertedIndex::Build(std::span<const DocInput> docs) {
  InvertedIndex index;
  std::unordered_set<std::string> seen;
  std::map<TokenId, uint64_t> df;
  index.docs_.reserve(docs.size());
  for (const DocInput& d : docs) {
    if (!seen.insert(d.id).second) {
      throw ValidationError("duplicate doc id '" + d.id + "'");
    }
    const DocId doc = index.docs_.size();
    index.docs_.push_back({d.id, d.text, d.payload});
    for (const SparseEntry& e : d.vector.entries()) {
      const QuantizedWeight q = Quantize(e.weight);
      // Weights below the smallest binary16 subnormal are not stored.
      if (q.bits == 0) continue;
      index.postings_[e.token].push_back({doc, q});
      ++df[e.token];
    }
  }
  index.stats_ = VocabStats(index.docs_.size(), std::move(df));
  return index;
}

std::vector<SearchHit> InvertedIndex::Search(const SparseVector& query,
                                             size_t k) const {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (query.empty() || docs_.empty()) return {};
  std::vector<double> accumulators(docs_.size(), 0.0);
  // Query entries are visited in increasing token order, so every document
  // accumulates its terms in the same order as DotScore would.
  for (const SparseEntry& q : query.entries()) {
    auto it = postings_.find(q.token);
    if (it == postings_.end()) continue;
    for (const Posting& p : it->second) {
      accumulators[p.doc] += q.weight * Dequantize(p.weight);
    }
  }
  std::vector<SearchHit> hits;
  for (DocId d = 0; d < accumulators.size(); ++d) {
    if (accumulators[d] > 0.0) hits.push_back({d, accumulators[d], 0});
  }
  const size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + n, hits.end(), HitBefore);
  hits.resize(n);
  for (size_t i = 0; i < hits.size(); ++i) {
    hits[i].rank = static_cast<uint32_t>(i + 1);
  }
  return hits;
}

size_t InvertedIndex::posting_count() const {
  size_t total = 0;
  for (const auto& [token, list] : postings_) total += list.size();
  return total;
}

double InvertedIndex::AverageNonZeroDims() const {
  if (docs_.empty()) return 0.0;
  return static_cast<double>(posting_count()) /
         static_cast<double>(docs_.size());
}

std::vector<uint8_t> SerializeIndex(const InvertedIndex& index) {
  ByteWriter doc_table;
  doc_table.Put<uint64_t>(index.docs().size());
  for (const DocEntry& d : index.docs()) {
    doc_table.PutString(d.id);
    doc_table.PutString(d.text);
    doc_table.PutString(d.payload);
  }

  ByteWriter postings;
  postings.Put<uint64_t>(index.postings().size());
  for (const auto& [token, list] : index.postings()) {
    postings.Put<uint32_t>(token);
    postings.Put<uint64_t>(list.size());
    for (const Posting& p : list) {
      postings.Put<uint64_t>(p.doc);
      postings.Put<uint16_t>(p.weight.bits);
    }
  }

  ByteWriter stats;
  stats.Put<uint64_t>(index.stats().doc_count());
  stats.Put<uint64_t>(index.stats().doc_freq().size());
  for (const auto& [token, df] : index.stats().doc_freq()) {
    stats.Put<uint32_t>(token);
    stats.Put<uint64_t>(df);
  }

  ByteWriter body;
  for (ByteWriter* section : {&doc_table, &postings, &stats}) {
    body.Put<uint64_t>(section->size());
    body.PutBytes(section->bytes());
  }

  ByteWriter out;
  out.PutBytes(std::span(reinterpret_cast<const uint8_t*>(kMagic), 4));
  out.Put<uint16_t>(kIndexFormatVersion);
  out.Put<uint64_t>(body.size());
  out.PutBytes(body.bytes());
  out.Put<uint32_t>(Crc32c(out.bytes()));
  return std::move(out.bytes());
}

InvertedIndex DeserializeIndex(std::span<const uint8_t> bytes) {
  const size_t magic_len = std::min<size_t>(4, bytes.size());
  if (!std::equal(kMagic, kMagic + magic_len, bytes.begin())) {
    throw FormatError("not an index file (bad magic)");
  }
  if (magic_len < 4) throw Error(ErrorCode::kTruncated, "index file is truncated");
  ByteReader header(bytes.subspan(4));
  const uint16_t version = header.Get<uint16_t>();
  if (version != kIndexFormatVersion) {
    throw Error(ErrorCode::kVersion,
                "unsupported index format version " + std::to_string(version) +
                    " (expected " + std::to_string(kIndexFormatVersion) + ")");
  }
  const uint64_t body_size = header.Get<uint64_t>();
  if (bytes.size() - kHeaderSize < body_size ||
      bytes.size() - kHeaderSize - body_size < 4) {
    throw Error(ErrorCode::kTruncated, "index file is truncated");
  }
  const size_t checked = kHeaderSize + body_size;
  if (bytes.size() != checked + 4) {
    throw FormatError("trailing bytes after index checksum");
  }
  ByteReader trailer(bytes.subspan(checked));
  if (trailer.Get<uint32_t>() != Crc32c(bytes.first(checked))) {
    throw Error(ErrorCode::kChecksum, "index checksum mismatch");
  }

  ByteReader body(bytes.subspan(kHeaderSize, body_size));
  auto section = [&body]() { return ByteReader(body.GetBytes(body.Get<uint64_t>())); };

  InvertedIndex index;
  ByteReader docs = section();
  const uint64_t n_docs = docs.Get<uint64_t>();
  for (uint64_t i = 0; i < n_docs; ++i) {
    DocEntry d;
    d.id = docs.GetString();
    d.text = docs.GetString();
    d.payload = docs.GetString();
    index.docs_.push_back(std::move(d));
  }

  ByteReader postings = section();
  const uint64_t n_tokens = postings.Get<uint64_t>();
  for (uint64_t i = 0; i < n_tokens; ++i) {
    const TokenId token = postings.Get<uint32_t>();
    const uint64_t n = postings.Get<uint64_t>();
    std::vector<Posting>& list = index.postings_[token];
    for (uint64_t j = 0; j < n; ++j) {
      Posting p;
      p.doc = postings.Get<uint64_t>();
      p.weight.bits = postings.Get<uint16_t>();
      if (p.doc >= n_docs || (!list.empty() && list.back().doc >= p.doc)) {
        throw FormatError("posting list for token " + std::to_string(token) +
                          " is out of order or out of range");
      }
      list.push_back(p);
    }
  }

  ByteReader stats = section();
  const uint64_t doc_count = stats.Get<uint64_t>();
  std::map<TokenId, uint64_t> df;
  const uint64_t n_df = stats.Get<uint64_t>();
  for (uint64_t i = 0; i < n_df; ++i) {
    const TokenId token = stats.Get<uint32_t>();
    df[token] = stats.Get<uint64_t>();
  }
  index.stats_ = VocabStats(doc_count, std::move(df));

  if (index.stats_.doc_count() != index.docs_.size()) {
    throw FormatError("stats doc_count disagrees with the doc table");
  }
  for (const auto& [token, list] : index.postings_) {
    if (index.stats_.DocFreq(token) != list.size()) {
      throw FormatError("stats doc_freq disagrees with postings for token " +
                        std::to_string(token));
    }
  }
  if (index.stats_.doc_freq().size() != index.postings_.size()) {
    throw FormatError("stats list tokens without postings");
  }
  return index;
}

void SaveIndex(const InvertedIndex& index, const std::string& path) {
  const std::vector<uint8_t> bytes = SerializeIndex(index);
  WriteFile(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                   bytes.size()));
}

InvertedIndex LoadIndex(const std::string& path) {
  const std::string raw = ReadFile(path);
  try {
    return DeserializeIndex(std::span(
        reinterpret_cast<const uint8_t*>(raw.data()), raw.size()));
  } catch (const Error& e) {
    throw Error(e.code(), "'" + path + "': " + e.what());
  }
}

}  // namespace sfns
