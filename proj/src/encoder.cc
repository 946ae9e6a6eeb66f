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

#include "encoder.h"

#include <algorithm>
#include <cmath>

#include "error.h"
#include "io.h"
#include "json.hpp"
#include "random.h"
#include "text.h"
#include "tokenizer.h"

namespace sfns {
namespace {

constexpr char kMagic[4] = {'S', 'F', 'N', 'E'};

// Winning position and pre-activation for one active output dimension.
struct ActiveDim {
  TokenId j;
  size_t position;
  double pre;
};

struct DocForward {
  std::vector<TokenId> tokens;
  std::vector<ActiveDim> active;  // increasing j
  SparseVector vector;
};

void CheckTokens(const EncoderParams& params, std::span<const TokenId> tokens) {
  if (tokens.empty()) throw ValidationError("cannot encode an empty token list");
  for (TokenId t : tokens) {
    if (t >= params.vocab_size()) {
      throw ValidationError("token id " + std::to_string(t) +
                            " outside encoder vocabulary of size " +
                            std::to_string(params.vocab_size()));
    }
  }
}

DocForward Forward(const EncoderParams& params, std::span<const TokenId> tokens) {
  CheckTokens(params, tokens);
  DocForward out;
  out.tokens.assign(tokens.begin(), tokens.end());
  std::vector<SparseEntry> entries;
  for (TokenId j = 0; j < params.vocab_size(); ++j) {
    size_t best_pos = 0;
    double best = PreActivation(params, j, tokens[0]);
    for (size_t pos = 1; pos < tokens.size(); ++pos) {
      const double z = PreActivation(params, j, tokens[pos]);
      if (z > best) {
        best = z;
        best_pos = pos;
      }
    }
    if (best > 0.0) {
      out.active.push_back({j, best_pos, best});
      entries.push_back({j, std::log1p(best)});
    }
  }
  out.vector = SparseVector(std::move(entries));
  return out;
}

double LogSumExp(std::span<const double> xs) {
  const double hi = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

// Forward pass over a batch plus dL/dw for every (doc, active dim).
struct BatchPass {
  LossBreakdown loss;
  std::vector<DocForward> docs;
  // Per doc, gradient of the loss w.r.t. each entry of docs[d].active.
  std::vector<std::vector<double>> weight_grads;
};

BatchPass RunBatch(const EncoderParams& params, const VocabStats& stats,
                   std::span<const TrainItem> batch, double lambda_reg,
                   bool want_grads) {
  if (batch.empty()) throw ValidationError("training batch is empty");
  if (!(lambda_reg >= 0.0)) throw ValidationError("lambda_reg must be >= 0");

  BatchPass pass;
  const size_t b = batch.size();
  // Docs: positives in item order, then each item's hard negatives.
  std::vector<std::vector<size_t>> item_negs(b);
  for (const TrainItem& item : batch) pass.docs.push_back(Forward(params, item.positive));
  for (size_t i = 0; i < b; ++i) {
    for (const auto& neg : batch[i].negatives) {
      item_negs[i].push_back(pass.docs.size());
      pass.docs.push_back(Forward(params, neg));
    }
  }
  const size_t n_docs = pass.docs.size();
  pass.loss.num_docs = n_docs;

  std::vector<SparseVector> queries;
  queries.reserve(b);
  for (const TrainItem& item : batch) {
    queries.push_back(
        QueryVectorFromTokens(item.query, params.vocab_size(), stats));
  }

  // Score gradient dL/ds(item, doc), accumulated per doc as sum_i g_i q_i.
  std::vector<std::vector<std::pair<size_t, double>>> score_grads(n_docs);
  std::vector<size_t> logit_docs;
  std::vector<double> logits;
  double infonce = 0.0;
  for (size_t i = 0; i < b; ++i) {
    logit_docs.clear();
    logit_docs.push_back(i);
    for (size_t d : item_negs[i]) logit_docs.push_back(d);
    for (size_t k = 0; k < b; ++k) {
      if (k != i) logit_docs.push_back(k);
    }
    logits.clear();
    for (size_t d : logit_docs) logits.push_back(DotScore(queries[i], pass.docs[d].vector));
    const double lse = LogSumExp(logits);
    infonce += lse - logits[0];
    if (want_grads) {
      for (size_t m = 0; m < logit_docs.size(); ++m) {
        const double p = std::exp(logits[m] - lse);
        const double g = (p - (m == 0 ? 1.0 : 0.0)) / static_cast<double>(b);
        score_grads[logit_docs[m]].emplace_back(i, g);
      }
    }
  }
  infonce /= static_cast<double>(b);

  std::vector<double> mean(params.vocab_size(), 0.0);
  double dims = 0.0;
  for (const DocForward& d : pass.docs) {
    dims += static_cast<double>(d.vector.size());
    for (const SparseEntry& e : d.vector.entries()) mean[e.token] += e.weight;
  }
  double flops = 0.0;
  for (double& m : mean) {
    m /= static_cast<double>(n_docs);
    flops += m * m;
  }

  pass.loss.infonce = infonce;
  pass.loss.flops = flops;
  pass.loss.total = infonce + lambda_reg * flops;
  pass.loss.avg_nonzero_dims = dims / static_cast<double>(n_docs);

  if (want_grads) {
    pass.weight_grads.resize(n_docs);
    for (size_t d = 0; d < n_docs; ++d) {
      const DocForward& doc = pass.docs[d];
      std::vector<double>& g = pass.weight_grads[d];
      g.assign(doc.active.size(), 0.0);
      for (size_t a = 0; a < doc.active.size(); ++a) {
        const TokenId j = doc.active[a].j;
        double v = lambda_reg * 2.0 * mean[j] / static_cast<double>(n_docs);
        for (const auto& [item, sg] : score_grads[d]) {
          v += sg * queries[item].WeightOf(j);
        }
        g[a] = v;
      }
    }
  }
  return pass;
}

}  // namespace

EncoderParams::EncoderParams(size_t vocab_size, size_t dim)
    : vocab_size_(vocab_size), dim_(dim), data_(vocab_size * (2 * dim + 1), 0.0f) {
  if (vocab_size == 0 || dim == 0) {
    throw ValidationError("encoder needs vocab_size >= 1 and dim >= 1");
  }
}

EncoderParams EncoderParams::Random(size_t vocab_size, size_t dim, uint64_t seed,
                                    double bias) {
  EncoderParams params(vocab_size, dim);
  Rng rng(seed);
  std::vector<double> v(dim);
  for (TokenId t = 0; t < vocab_size; ++t) {
    double norm = 0.0;
    for (double& x : v) {
      x = rng.Normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (size_t k = 0; k < dim; ++k) {
      const float value = static_cast<float>(v[k] / norm);
      params.embed(t)[k] = value;
      params.proj(t)[k] = value;
    }
    params.bias(t) = static_cast<float>(bias);
  }
  return params;
}

double PreActivation(const EncoderParams& params, TokenId j, TokenId t) {
  auto e = params.proj(j);
  auto h = params.embed(t);
  double z = params.bias(j);
  for (size_t k = 0; k < e.size(); ++k) {
    z += static_cast<double>(e[k]) * static_cast<double>(h[k]);
  }
  return z;
}

SparseVector EncodeDoc(const EncoderParams& params,
                       std::span<const TokenId> tokens) {
  return Forward(params, tokens).vector;
}

SparseVector EncodeDocText(const EncoderParams& params,
                           const TokenizerModel& tokenizer,
                           std::string_view text) {
  std::vector<TokenId> tokens = Segment(tokenizer, Normalize(text));
  std::erase_if(tokens, [&](TokenId t) { return t >= tokenizer.size(); });
  if (tokens.empty()) return SparseVector();
  return EncodeDoc(params, tokens);
}

LossBreakdown Loss(const EncoderParams& params, const VocabStats& stats,
                   std::span<const TrainItem> batch, double lambda_reg) {
  return RunBatch(params, stats, batch, lambda_reg, false).loss;
}

Gradients Grad(const EncoderParams& params, const VocabStats& stats,
               std::span<const TrainItem> batch, double lambda_reg) {
  BatchPass pass = RunBatch(params, stats, batch, lambda_reg, true);
  Gradients out;
  out.loss = pass.loss;
  out.values.assign(params.flat().size(), 0.0);
  const size_t dim = params.dim();
  for (size_t d = 0; d < pass.docs.size(); ++d) {
    const DocForward& doc = pass.docs[d];
    for (size_t a = 0; a < doc.active.size(); ++a) {
      const ActiveDim& act = doc.active[a];
      // d/dz log1p(z) for z > 0.
      const double gz = pass.weight_grads[d][a] / (1.0 + act.pre);
      if (gz == 0.0) continue;
      const TokenId t = doc.tokens[act.position];
      auto e = params.proj(act.j);
      auto h = params.embed(t);
      double* g_embed = &out.values[t * dim];
      double* g_proj = &out.values[params.proj_offset() + act.j * dim];
      for (size_t k = 0; k < dim; ++k) {
        g_proj[k] += gz * h[k];
        g_embed[k] += gz * e[k];
      }
      out.values[params.bias_offset() + act.j] += gz;
    }
  }
  return out;
}

TrainResult Train(const EncoderParams& init, const VocabStats& stats,
                  std::span<const TrainItem> dataset, const TrainConfig& config) {
  if (dataset.empty()) throw ValidationError("training dataset is empty");
  if (config.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(config.lambda_reg >= 0.0)) throw ValidationError("lambda_reg must be >= 0");
  if (!(config.lr > 0.0)) throw ValidationError("lr must be > 0");

  TrainResult result{init, {}};
  std::vector<double> velocity(init.flat().size(), 0.0);
  Rng rng(config.seed);
  std::vector<size_t> order(dataset.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.Shuffle(order);
  size_t cursor = 0;

  std::vector<TrainItem> batch;
  for (size_t step = 0; step < config.steps; ++step) {
    batch.clear();
    const size_t size = std::min(config.batch_size, dataset.size());
    while (batch.size() < size) {
      if (cursor == order.size()) {
        rng.Shuffle(order);
        cursor = 0;
      }
      TrainItem item = dataset[order[cursor++]];
      if (item.negatives.size() > config.negatives_per_query) {
        item.negatives.resize(config.negatives_per_query);
      }
      batch.push_back(std::move(item));
    }
    const Gradients g = Grad(result.params, stats, batch, config.lambda_reg);
    std::span<float> flat = result.params.flat();
    for (size_t k = 0; k < flat.size(); ++k) {
      velocity[k] = config.momentum * velocity[k] + g.values[k];
      flat[k] = static_cast<float>(flat[k] - config.lr * velocity[k]);
    }
    result.telemetry.push_back({step, g.loss.total, g.loss.infonce,
                                g.loss.flops, g.loss.avg_nonzero_dims});
  }
  return result;
}

std::vector<uint8_t> SerializeEncoder(const EncoderParams& params) {
  ByteWriter out;
  out.PutBytes(std::span(reinterpret_cast<const uint8_t*>(kMagic), 4));
  out.Put<uint32_t>(static_cast<uint32_t>(params.vocab_size()));
  out.Put<uint32_t>(static_cast<uint32_t>(params.dim()));
  for (float v : params.flat()) out.Put<float>(v);
  out.Put<uint32_t>(Crc32c(out.bytes()));
  return std::move(out.bytes());
}

EncoderParams DeserializeEncoder(std::span<const uint8_t> bytes) {
  const size_t magic_len = std::min<size_t>(4, bytes.size());
  if (!std::equal(kMagic, kMagic + magic_len, bytes.begin())) {
    throw FormatError("not an encoder params file (bad magic)");
  }
  if (magic_len < 4) throw Error(ErrorCode::kTruncated, "encoder params file is truncated");
  ByteReader header(bytes.subspan(4));
  const uint32_t vocab = header.Get<uint32_t>();
  const uint32_t dim = header.Get<uint32_t>();
  if (vocab == 0 || dim == 0) throw FormatError("encoder dims must be positive");
  const uint64_t n_floats = static_cast<uint64_t>(vocab) * (2ull * dim + 1);
  const uint64_t expected = 12 + 4 * n_floats + 4;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::kTruncated, "encoder params file is truncated");
  }
  if (bytes.size() > expected) throw FormatError("trailing bytes after encoder checksum");
  ByteReader trailer(bytes.subspan(expected - 4));
  if (trailer.Get<uint32_t>() != Crc32c(bytes.first(expected - 4))) {
    throw Error(ErrorCode::kChecksum, "encoder params checksum mismatch");
  }
  EncoderParams params(vocab, dim);
  for (float& v : params.flat()) {
    v = header.Get<float>();
    if (!std::isfinite(v)) throw FormatError("non-finite encoder parameter");
  }
  return params;
}

void SaveEncoder(const EncoderParams& params, const std::string& path) {
  const std::vector<uint8_t> bytes = SerializeEncoder(params);
  WriteFile(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                   bytes.size()));
}

EncoderParams LoadEncoder(const std::string& path) {
  const std::string raw = ReadFile(path);
  try {
    return DeserializeEncoder(
        std::span(reinterpret_cast<const uint8_t*>(raw.data()), raw.size()));
  } catch (const Error& e) {
    throw Error(e.code(), "'" + path + "': " + e.what());
  }
}

ExternalVectors LoadExternalVectors(const std::string& path,
                                    const TokenizerModel& tokenizer) {
  ExternalVectors out;
  ForEachLine(path, [&](size_t line_no, std::string_view line) {
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + ": malformed JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("vec") ||
        !j["vec"].is_object()) {
      throw FormatError(where + ": expected {\"id\": ..., \"vec\": {...}}");
    }
    DocInput doc;
    doc.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    if (j.contains("text") && j["text"].is_string()) doc.text = j["text"];
    if (j.contains("payload") && j["payload"].is_string()) doc.payload = j["payload"];
    std::vector<SparseEntry> entries;
    for (const auto& [piece, weight] : j["vec"].items()) {
      if (!weight.is_number()) {
        throw FormatError(where + ": weight of '" + piece + "' is not a number");
      }
      const std::optional<TokenId> id = tokenizer.FindUtf8(piece);
      if (!id) {
        out.warnings.push_back(where + ": unknown piece '" + piece + "' skipped");
        continue;
      }
      const double w = weight.get<double>();
      if (!std::isfinite(w) || w < 0.0) {
        throw ValidationError(where + ": weight of '" + piece +
                              "' must be finite and non-negative");
      }
      entries.push_back({*id, w});
    }
    doc.vector = SparseVector(std::move(entries));
    out.docs.push_back(std::move(doc));
  });
  return out;
}

}  // namespace sfns
