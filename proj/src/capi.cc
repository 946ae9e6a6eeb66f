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

#include "sfns/sfns.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "encoder.h"
#include "error.h"
#include "index.h"
#include "json.hpp"
#include "pipelines.h"
#include "retrieval.h"
#include "text.h"
#include "tokenizer.h"

struct sfns_tokenizer {
  std::shared_ptr<const sfns::TokenizerModel> model;
};

struct sfns_encoder {
  std::shared_ptr<const sfns::EncoderParams> params;
};

struct sfns_index {
  sfns::InvertedIndex index;
};

namespace {

thread_local std::string last_error;

sfns_status Fail(sfns_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename Fn>
sfns_status Guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SFNS_OK;
  } catch (const sfns::Error& e) {
    return Fail(static_cast<sfns_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return Fail(SFNS_ERR_FORMAT, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(SFNS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(SFNS_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(SFNS_ERR_INTERNAL, "unknown error");
  }
}

void RequireArg(const void* p, const char* name) {
  if (p == nullptr) {
    throw sfns::ValidationError(std::string(name) + " must not be NULL");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* sfns_version(void) { return "0.1.0"; }

const char* sfns_status_name(sfns_status status) {
  switch (status) {
    case SFNS_OK: return "ok";
    case SFNS_ERR_VALIDATION: return "validation";
    case SFNS_ERR_IO: return "io";
    case SFNS_ERR_FORMAT: return "format";
    case SFNS_ERR_CHECKSUM: return "checksum";
    case SFNS_ERR_VERSION: return "version";
    case SFNS_ERR_TRUNCATED: return "truncated";
    case SFNS_ERR_INTERNAL: return "internal";
    case SFNS_STATUS_MAX_ENUM: break;
  }
  return "unknown";
}

const char* sfns_last_error(void) { return last_error.c_str(); }

void sfns_string_free(char* s) { std::free(s); }

sfns_status sfns_tokenizer_load(const char* path, sfns_tokenizer** out) {
  return Guard([&] {
    RequireArg(path, "path");
    RequireArg(out, "out");
    *out = nullptr;
    auto model = std::make_shared<const sfns::TokenizerModel>(sfns::LoadTokenizer(path));
    *out = new sfns_tokenizer{std::move(model)};
  });
}

sfns_status sfns_tokenizer_train(const char* const* lines, size_t n_lines,
                                 size_t vocab_size, int max_piece_len,
                                 sfns_tokenizer** out) {
  return Guard([&] {
    RequireArg(out, "out");
    *out = nullptr;
    if (n_lines > 0) RequireArg(lines, "lines");
    std::vector<std::string> corpus;
    for (size_t i = 0; i < n_lines; ++i) {
      RequireArg(lines[i], "lines[i]");
      corpus.emplace_back(lines[i]);
    }
    sfns::UnigramTrainerConfig cfg;
    cfg.vocab_size = vocab_size;
    cfg.max_piece_len = max_piece_len;
    auto model =
        std::make_shared<const sfns::TokenizerModel>(sfns::TrainUnigram(corpus, cfg));
    *out = new sfns_tokenizer{std::move(model)};
  });
}

sfns_status sfns_tokenizer_save(const sfns_tokenizer* tok, const char* path) {
  return Guard([&] {
    RequireArg(tok, "tok");
    RequireArg(path, "path");
    sfns::SaveTokenizer(*tok->model, path);
  });
}

size_t sfns_tokenizer_size(const sfns_tokenizer* tok) {
  return tok == nullptr ? 0 : tok->model->size();
}

sfns_status sfns_tokenizer_segment(const sfns_tokenizer* tok, const char* text,
                                   uint32_t* ids, size_t capacity, size_t* n_ids) {
  return Guard([&] {
    RequireArg(tok, "tok");
    RequireArg(text, "text");
    RequireArg(n_ids, "n_ids");
    if (capacity > 0) RequireArg(ids, "ids");
    const auto tokens = sfns::Segment(*tok->model, sfns::Normalize(text));
    for (size_t i = 0; i < tokens.size() && i < capacity; ++i) ids[i] = tokens[i];
    *n_ids = tokens.size();
  });
}

sfns_status sfns_tokenizer_piece(const sfns_tokenizer* tok, uint32_t id,
                                 char** piece) {
  return Guard([&] {
    RequireArg(tok, "tok");
    RequireArg(piece, "piece");
    if (id >= tok->model->size()) {
      throw sfns::ValidationError("piece id " + std::to_string(id) + " out of range");
    }
    *piece = CopyString(tok->model->PieceUtf8(id));
  });
}

void sfns_tokenizer_free(sfns_tokenizer* tok) { delete tok; }

sfns_status sfns_encoder_load(const char* path, sfns_encoder** out) {
  return Guard([&] {
    RequireArg(path, "path");
    RequireArg(out, "out");
    *out = nullptr;
    *out = new sfns_encoder{
        std::make_shared<const sfns::EncoderParams>(sfns::LoadEncoder(path))};
  });
}

sfns_status sfns_encoder_random(size_t vocab_size, size_t dim, uint64_t seed,
                                sfns_encoder** out) {
  return Guard([&] {
    RequireArg(out, "out");
    *out = nullptr;
    *out = new sfns_encoder{std::make_shared<const sfns::EncoderParams>(
        sfns::EncoderParams::Random(vocab_size, dim, seed))};
  });
}

sfns_status sfns_encoder_save(const sfns_encoder* enc, const char* path) {
  return Guard([&] {
    RequireArg(enc, "enc");
    RequireArg(path, "path");
    sfns::SaveEncoder(*enc->params, path);
  });
}

sfns_status sfns_encoder_encode(const sfns_encoder* enc, const sfns_tokenizer* tok,
                                const char* text, char** vector) {
  return Guard([&] {
    RequireArg(enc, "enc");
    RequireArg(tok, "tok");
    RequireArg(text, "text");
    RequireArg(vector, "vector");
    if (enc->params->vocab_size() != tok->model->size()) {
      throw sfns::ValidationError("encoder and tokenizer vocabularies differ");
    }
    *vector = CopyString(
        sfns::ToText(sfns::EncodeDocText(*enc->params, *tok->model, text)));
  });
}

void sfns_encoder_free(sfns_encoder* enc) { delete enc; }

sfns_status sfns_index_build(const sfns_tokenizer* tok, const sfns_encoder* enc,
                             const char* const* ids, const char* const* texts,
                             size_t n_docs, sfns_index** out) {
  return Guard([&] {
    RequireArg(tok, "tok");
    RequireArg(out, "out");
    *out = nullptr;
    if (n_docs > 0) {
      RequireArg(ids, "ids");
      RequireArg(texts, "texts");
    }
    if (enc != nullptr && enc->params->vocab_size() != tok->model->size()) {
      throw sfns::ValidationError("encoder and tokenizer vocabularies differ");
    }
    sfns::DocEncoder encoder = enc != nullptr
                                   ? sfns::ExpansionDocEncoder(tok->model, enc->params)
                                   : sfns::IndicatorDocEncoder(tok->model);
    std::vector<sfns::DocInput> docs;
    for (size_t i = 0; i < n_docs; ++i) {
      RequireArg(ids[i], "ids[i]");
      RequireArg(texts[i], "texts[i]");
      docs.push_back({ids[i], texts[i], encoder(texts[i]), ""});
    }
    *out = new sfns_index{sfns::InvertedIndex::Build(docs)};
  });
}

sfns_status sfns_index_load(const char* path, sfns_index** out) {
  return Guard([&] {
    RequireArg(path, "path");
    RequireArg(out, "out");
    *out = nullptr;
    *out = new sfns_index{sfns::LoadIndex(path)};
  });
}

sfns_status sfns_index_save(const sfns_index* index, const char* path) {
  return Guard([&] {
    RequireArg(index, "index");
    RequireArg(path, "path");
    sfns::SaveIndex(index->index, path);
  });
}

size_t sfns_index_doc_count(const sfns_index* index) {
  return index == nullptr ? 0 : index->index.doc_count();
}

const char* sfns_index_doc_id(const sfns_index* index, uint64_t doc) {
  if (index == nullptr || doc >= index->index.doc_count()) return nullptr;
  return index->index.doc(doc).id.c_str();
}

sfns_status sfns_index_search(const sfns_index* index, const sfns_tokenizer* tok,
                              const char* query, sfns_query_weighting weighting,
                              size_t k, sfns_hit* hits, size_t* n_hits) {
  return Guard([&] {
    RequireArg(index, "index");
    RequireArg(tok, "tok");
    RequireArg(query, "query");
    RequireArg(hits, "hits");
    RequireArg(n_hits, "n_hits");
    if (weighting != SFNS_WEIGHTING_IDF && weighting != SFNS_WEIGHTING_NONE) {
      throw sfns::ValidationError("unknown query weighting");
    }
    const sfns::SparseVector q = sfns::EncodeQuery(
        *tok->model, index->index.stats(), query,
        weighting == SFNS_WEIGHTING_IDF ? sfns::QueryWeighting::kIdf
                                        : sfns::QueryWeighting::kIndicator);
    const auto found = index->index.Search(q, k);
    for (size_t i = 0; i < found.size(); ++i) {
      hits[i] = {found[i].doc, found[i].score, found[i].rank};
    }
    *n_hits = found.size();
  });
}

void sfns_index_free(sfns_index* index) { delete index; }

sfns_status sfns_run(const char* command, const char* options_json,
                     char** report_json) {
  return Guard([&] {
    RequireArg(command, "command");
    RequireArg(report_json, "report_json");
    *report_json = nullptr;
    nlohmann::json options = nlohmann::json::object();
    if (options_json != nullptr) {
      try {
        options = nlohmann::json::parse(options_json);
      } catch (const nlohmann::json::exception& e) {
        throw sfns::ValidationError(std::string("options are not valid JSON: ") +
                                    e.what());
      }
    }
    *report_json = CopyString(sfns::RunPipeline(command, options).dump());
  });
}

}  // extern "C"
