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

// Document expansion encoder. Each token t has a static embedding h_t; the
// weight of output token j is the max over document positions of
// log(1 + relu(E_j . h_t + b_j)). Trained with InfoNCE against IDF query
// vectors plus a FLOPS sparsity penalty.

#ifndef SFNS_ENCODER_H_
#define SFNS_ENCODER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "index.h"
#include "sparse.h"

namespace sfns {

class TokenizerModel;

// All parameters live in one flat float buffer laid out as
// [embed (V x D) | proj (V x D) | bias (V)], row-major.
class EncoderParams {
 public:
  EncoderParams(size_t vocab_size, size_t dim);

  // Unit-norm random embeddings with the projection tied to them, so each
  // token initially activates itself and its closest neighbours.
  static EncoderParams Random(size_t vocab_size, size_t dim, uint64_t seed,
                              double bias = -0.5);

  size_t vocab_size() const { return vocab_size_; }
  size_t dim() const { return dim_; }

  std::span<float> embed(TokenId t) { return {&data_[t * dim_], dim_}; }
  std::span<const float> embed(TokenId t) const { return {&data_[t * dim_], dim_}; }
  std::span<float> proj(TokenId j) { return {&data_[proj_offset() + j * dim_], dim_}; }
  std::span<const float> proj(TokenId j) const {
    return {&data_[proj_offset() + j * dim_], dim_};
  }
  float& bias(TokenId j) { return data_[bias_offset() + j]; }
  float bias(TokenId j) const { return data_[bias_offset() + j]; }

  std::span<float> flat() { return data_; }
  std::span<const float> flat() const { return data_; }

  size_t proj_offset() const { return vocab_size_ * dim_; }
  size_t bias_offset() const { return 2 * vocab_size_ * dim_; }

  bool operator==(const EncoderParams&) const = default;

 private:
  size_t vocab_size_;
  size_t dim_;
  std::vector<float> data_;
};

// Pre-activation E_j . h_t + b_j in double precision.
double PreActivation(const EncoderParams& params, TokenId j, TokenId t);

// Throws on an empty token list or ids outside the vocabulary.
SparseVector EncodeDoc(const EncoderParams& params,
                       std::span<const TokenId> tokens);

// Normalizes and segments `text`, drops unknown characters, then encodes.
// Returns an empty vector when nothing known remains.
SparseVector EncodeDocText(const EncoderParams& params,
                           const TokenizerModel& tokenizer,
                           std::string_view text);

struct TrainItem {
  std::vector<TokenId> query;
  std::vector<TokenId> positive;
  std::vector<std::vector<TokenId>> negatives;
};

struct LossBreakdown {
  double total = 0.0;
  double infonce = 0.0;
  double flops = 0.0;
  // Documents entering the FLOPS mean: positives plus hard negatives.
  size_t num_docs = 0;
  double avg_nonzero_dims = 0.0;
};

// Query vectors are the IDF encodings of the item queries under `stats`;
// only document-side parameters receive gradient.
LossBreakdown Loss(const EncoderParams& params, const VocabStats& stats,
                   std::span<const TrainItem> batch, double lambda_reg);

struct Gradients {
  LossBreakdown loss;
  std::vector<double> values;  // same layout as EncoderParams::flat()
};

// Max-pooling ties credit the lowest position; relu'(0) = 0.
Gradients Grad(const EncoderParams& params, const VocabStats& stats,
               std::span<const TrainItem> batch, double lambda_reg);

struct TrainConfig {
  double lr = 0.05;
  double momentum = 0.9;
  size_t steps = 200;
  size_t batch_size = 16;
  double lambda_reg = 1e-2;
  uint64_t seed = 0;
  size_t negatives_per_query = 4;
};

struct StepTelemetry {
  size_t step = 0;
  double loss = 0.0;
  double infonce = 0.0;
  double flops = 0.0;
  double avg_nonzero_dims = 0.0;
};

struct TrainResult {
  EncoderParams params;
  std::vector<StepTelemetry> telemetry;
};

// SGD with momentum over seeded shuffles of `dataset`.
TrainResult Train(const EncoderParams& init, const VocabStats& stats,
                  std::span<const TrainItem> dataset, const TrainConfig& config);

// "SFNE", u32 vocab size, u32 dim, little-endian float32 embed, proj, bias,
// then u32 CRC32C of all preceding bytes.
std::vector<uint8_t> SerializeEncoder(const EncoderParams& params);
EncoderParams DeserializeEncoder(std::span<const uint8_t> bytes);
void SaveEncoder(const EncoderParams& params, const std::string& path);
EncoderParams LoadEncoder(const std::string& path);

struct ExternalVectors {
  std::vector<DocInput> docs;
  std::vector<std::string> warnings;
};

// JSONL lines `{"id": ..., "vec": {"<piece>": weight, ...}}` with optional
// "text" and "payload". Unknown pieces are skipped with a warning.
ExternalVectors LoadExternalVectors(const std::string& path,
                                    const TokenizerModel& tokenizer);

}  // namespace sfns

#endif  // SFNS_ENCODER_H_
