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

#include "retrieval.h"

#include "text.h"

namespace sfns {

DocEncoder IndicatorDocEncoder(std::shared_ptr<const TokenizerModel> tokenizer) {
  return [tokenizer](std::string_view text) {
    const std::vector<TokenId> tokens = Segment(*tokenizer, Normalize(text));
    return QueryVectorFromTokens(tokens, tokenizer->size(), VocabStats(),
                                 QueryWeighting::kIndicator);
  };
}

DocEncoder ExpansionDocEncoder(std::shared_ptr<const TokenizerModel> tokenizer,
                               std::shared_ptr<const EncoderParams> params) {
  return [tokenizer, params](std::string_view text) {
    return EncodeDocText(*params, *tokenizer, text);
  };
}

SparseRetriever::SparseRetriever(std::shared_ptr<const TokenizerModel> tokenizer,
                                 InvertedIndex index, DocEncoder doc_encoder,
                                 QueryWeighting weighting)
    : tokenizer_(std::move(tokenizer)),
      index_(std::move(index)),
      doc_encoder_(std::move(doc_encoder)),
      weighting_(weighting) {}

std::unique_ptr<SparseRetriever> SparseRetriever::Build(
    std::shared_ptr<const TokenizerModel> tokenizer,
    std::span<const TextDoc> docs, DocEncoder doc_encoder,
    QueryWeighting weighting) {
  std::vector<DocInput> inputs;
  inputs.reserve(docs.size());
  for (const TextDoc& d : docs) {
    inputs.push_back({d.id, d.text, doc_encoder(d.text), d.payload});
  }
  return std::make_unique<SparseRetriever>(std::move(tokenizer),
                                           InvertedIndex::Build(inputs),
                                           std::move(doc_encoder), weighting);
}

SparseVector SparseRetriever::EncodeQuery(std::string_view query) const {
  return sfns::EncodeQuery(*tokenizer_, index_.stats(), query, weighting_);
}

std::vector<SearchHit> SparseRetriever::Search(std::string_view query,
                                               size_t k) const {
  return index_.Search(EncodeQuery(query), k);
}

double SparseRetriever::SelfScore(std::string_view query) const {
  // Compare against the stored form, i.e. after binary16 quantization.
  return DotScore(EncodeQuery(query), QuantizeRoundTrip(doc_encoder_(query)));
}

}  // namespace sfns
