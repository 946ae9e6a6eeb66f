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

// Text-in, hits-out retrievers sharing one interface, and the learned
// sparse retriever built on the inverted index.

#ifndef SFNS_RETRIEVAL_H_
#define SFNS_RETRIEVAL_H_

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "encoder.h"
#include "index.h"
#include "sparse.h"
#include "tokenizer.h"

namespace sfns {

struct TextDoc {
  std::string id;
  std::string text;
  std::string payload;
};

class Retriever {
 public:
  virtual ~Retriever() = default;

  virtual std::vector<SearchHit> Search(std::string_view query,
                                        size_t k) const = 0;

  // Score the query would receive against a stored copy of itself; used to
  // turn raw scores into [0, 1] similarities.
  virtual double SelfScore(std::string_view query) const = 0;

  virtual std::span<const DocEntry> docs() const = 0;
};

using DocEncoder = std::function<SparseVector(std::string_view text)>;

// Weight 1.0 on every distinct known token of the text (no expansion).
DocEncoder IndicatorDocEncoder(std::shared_ptr<const TokenizerModel> tokenizer);

// Max-pooled neural expansion.
DocEncoder ExpansionDocEncoder(std::shared_ptr<const TokenizerModel> tokenizer,
                               std::shared_ptr<const EncoderParams> params);

class SparseRetriever : public Retriever {
 public:
  SparseRetriever(std::shared_ptr<const TokenizerModel> tokenizer,
                  InvertedIndex index, DocEncoder doc_encoder,
                  QueryWeighting weighting = QueryWeighting::kIdf);

  static std::unique_ptr<SparseRetriever> Build(
      std::shared_ptr<const TokenizerModel> tokenizer,
      std::span<const TextDoc> docs, DocEncoder doc_encoder,
      QueryWeighting weighting = QueryWeighting::kIdf);

  SparseVector EncodeQuery(std::string_view query) const;

  std::vector<SearchHit> Search(std::string_view query, size_t k) const override;
  double SelfScore(std::string_view query) const override;
  std::span<const DocEntry> docs() const override { return index_.docs(); }

  const InvertedIndex& index() const { return index_; }

 private:
  std::shared_ptr<const TokenizerModel> tokenizer_;
  InvertedIndex index_;
  DocEncoder doc_encoder_;
  QueryWeighting weighting_;
};

}  // namespace sfns

#endif  // SFNS_RETRIEVAL_H_
