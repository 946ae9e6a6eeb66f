/* Copyright 2026 The sfns Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the sparse retrieval engine.
 *
 * Every fallible call returns an sfns_status. On failure a message is
 * available from sfns_last_error() on the same thread until the next call.
 * Strings returned through char** are owned by the caller and released with
 * sfns_string_free(). Handles are released with their *_free function;
 * passing NULL to any *_free is a no-op. Const handles may be shared across
 * threads. */

#ifndef SFNS_SFNS_H_
#define SFNS_SFNS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SFNS_BUILDING_LIBRARY)
#define SFNS_API __declspec(dllexport)
#else
#define SFNS_API __declspec(dllimport)
#endif
#else
#define SFNS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sfns_status {
  SFNS_OK = 0,
  SFNS_ERR_VALIDATION = 1,
  SFNS_ERR_IO = 2,
  SFNS_ERR_FORMAT = 3,
  SFNS_ERR_CHECKSUM = 4,
  SFNS_ERR_VERSION = 5,
  SFNS_ERR_TRUNCATED = 6,
  SFNS_ERR_INTERNAL = 7,
  /* Widens the enum so any int32 passed from C is a valid value. */
  SFNS_STATUS_MAX_ENUM = 0x7FFFFFFF
} sfns_status;

typedef enum sfns_query_weighting {
  SFNS_WEIGHTING_IDF = 0,
  SFNS_WEIGHTING_NONE = 1,
  SFNS_WEIGHTING_MAX_ENUM = 0x7FFFFFFF
} sfns_query_weighting;

typedef struct sfns_tokenizer sfns_tokenizer;
typedef struct sfns_index sfns_index;
typedef struct sfns_encoder sfns_encoder;

typedef struct sfns_hit {
  uint64_t doc;
  double score;
  uint32_t rank;
} sfns_hit;

SFNS_API const char* sfns_version(void);
SFNS_API const char* sfns_status_name(sfns_status status);
SFNS_API const char* sfns_last_error(void);
SFNS_API void sfns_string_free(char* s);

/* Tokenizer. */
SFNS_API sfns_status sfns_tokenizer_load(const char* path, sfns_tokenizer** out);
SFNS_API sfns_status sfns_tokenizer_train(const char* const* lines, size_t n_lines,
                                          size_t vocab_size, int max_piece_len,
                                          sfns_tokenizer** out);
SFNS_API sfns_status sfns_tokenizer_save(const sfns_tokenizer* tok, const char* path);
SFNS_API size_t sfns_tokenizer_size(const sfns_tokenizer* tok);
/* Writes up to `capacity` ids; *n_ids receives the full count. Unknown
 * characters map to id sfns_tokenizer_size(). */
SFNS_API sfns_status sfns_tokenizer_segment(const sfns_tokenizer* tok,
                                            const char* text, uint32_t* ids,
                                            size_t capacity, size_t* n_ids);
/* Piece text for an id as a new string. */
SFNS_API sfns_status sfns_tokenizer_piece(const sfns_tokenizer* tok, uint32_t id,
                                          char** piece);
SFNS_API void sfns_tokenizer_free(sfns_tokenizer* tok);

/* Encoder parameters. */
SFNS_API sfns_status sfns_encoder_load(const char* path, sfns_encoder** out);
SFNS_API sfns_status sfns_encoder_random(size_t vocab_size, size_t dim,
                                         uint64_t seed, sfns_encoder** out);
SFNS_API sfns_status sfns_encoder_save(const sfns_encoder* enc, const char* path);
/* Document vector as "id:weight id:weight ..." text. */
SFNS_API sfns_status sfns_encoder_encode(const sfns_encoder* enc,
                                         const sfns_tokenizer* tok,
                                         const char* text, char** vector);
SFNS_API void sfns_encoder_free(sfns_encoder* enc);

/* Inverted index. `enc` may be NULL for indicator document weights. */
SFNS_API sfns_status sfns_index_build(const sfns_tokenizer* tok,
                                      const sfns_encoder* enc,
                                      const char* const* ids,
                                      const char* const* texts, size_t n_docs,
                                      sfns_index** out);
SFNS_API sfns_status sfns_index_load(const char* path, sfns_index** out);
SFNS_API sfns_status sfns_index_save(const sfns_index* index, const char* path);
SFNS_API size_t sfns_index_doc_count(const sfns_index* index);
/* Borrowed pointer, valid while the index lives. */
SFNS_API const char* sfns_index_doc_id(const sfns_index* index, uint64_t doc);
/* `hits` must have room for `k` entries; *n_hits receives the number written.
 * Hits are ordered by score descending, then doc ascending. */
SFNS_API sfns_status sfns_index_search(const sfns_index* index,
                                       const sfns_tokenizer* tok,
                                       const char* query,
                                       sfns_query_weighting weighting, size_t k,
                                       sfns_hit* hits, size_t* n_hits);
SFNS_API void sfns_index_free(sfns_index* index);

/* File-level pipelines. `command` is one of tokenize.train, tokenize.apply,
 * encoder.train, encoder.encode, index.build, index.search, index.stats,
 * search, mine.pairs, mine.negatives, mine.split, eval.run, sim.replay,
 * gen.synth. `options_json` is a JSON object (NULL means {}). On success
 * *report_json receives the JSON report. */
SFNS_API sfns_status sfns_run(const char* command, const char* options_json,
                              char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* SFNS_SFNS_H_ */
