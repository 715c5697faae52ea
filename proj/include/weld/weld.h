/*
 * Copyright 2026 The weld Authors
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

#ifndef WELD_WELD_H
#define WELD_WELD_H

/*
 * C interface to the weld language-divergence toolkit.
 *
 * Objects are opaque handles created by weld_*_load / weld_*_train style
 * functions and released with the matching weld_*_free. Every fallible call
 * returns a weld_status; on failure weld_last_error() describes the problem
 * (thread-local, valid until the next weld call on the same thread).
 * Strings returned through char** out-parameters are owned by the caller and
 * released with weld_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WELD_BUILDING_LIBRARY)
#    define WELD_API __declspec(dllexport)
#  else
#    define WELD_API __declspec(dllimport)
#  endif
#else
#  define WELD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum weld_status {
  WELD_OK = 0,
  WELD_ERR_INVALID_ARGUMENT = 1,
  WELD_ERR_IO = 2,
  WELD_ERR_PARSE = 3,
  WELD_ERR_NOT_FOUND = 4,
  WELD_ERR_NUMERIC = 5,
  WELD_ERR_FORMAT = 6,
  WELD_ERR_CONFIG = 7,
  WELD_ERR_INTERNAL = 8
} weld_status;

WELD_API const char* weld_version(void);
WELD_API const char* weld_last_error(void);
/* Pipeline stage of the last error ("ingest", "train", ...), or "". */
WELD_API const char* weld_last_error_stage(void);
WELD_API const char* weld_status_string(weld_status status);
WELD_API void weld_string_free(char* s);

/* ---- corpus ------------------------------------------------------------ */

typedef struct weld_corpus weld_corpus;

/* format: "tsv" or "bible-xml". punctuation: "delete" or "split". */
WELD_API weld_status weld_corpus_load(const char* directory, const char* format,
                                      const char* punctuation, weld_corpus** out);
WELD_API void weld_corpus_free(weld_corpus* corpus);
WELD_API size_t weld_corpus_language_count(const weld_corpus* corpus);
WELD_API const char* weld_corpus_language(const weld_corpus* corpus, size_t index);
WELD_API size_t weld_corpus_verse_count(const weld_corpus* corpus);
WELD_API size_t weld_corpus_dropped(const weld_corpus* corpus, size_t language_index);
/* One tokenized verse per line, tokens separated by single spaces. */
WELD_API weld_status weld_corpus_write_sentences(const weld_corpus* corpus, const char* language,
                                                 const char* path);

/* Space-joined tokens of `text`. */
WELD_API weld_status weld_tokenize(const char* text, char** out);

/* ---- vocabulary -------------------------------------------------------- */

typedef struct weld_vocab weld_vocab;

/* Sentences file: one sentence per line, whitespace-separated tokens. */
WELD_API weld_status weld_vocab_build(const char* sentences_path, uint64_t min_count, weld_vocab** out);
WELD_API weld_status weld_vocab_load(const char* path, weld_vocab** out);
WELD_API weld_status weld_vocab_save(const weld_vocab* vocab, const char* path);
WELD_API void weld_vocab_free(weld_vocab* vocab);
WELD_API size_t weld_vocab_size(const weld_vocab* vocab);
WELD_API const char* weld_vocab_word(const weld_vocab* vocab, size_t id);
WELD_API uint64_t weld_vocab_count(const weld_vocab* vocab, size_t id);

/* ---- genome ------------------------------------------------------------ */

typedef struct weld_genome weld_genome;

/* format: "fasta" or "tsv". policy: "reject" or "clean". */
WELD_API weld_status weld_genome_load(const char* path, const char* format, const char* policy,
                                      weld_genome** out);
WELD_API void weld_genome_free(weld_genome* genome);
WELD_API const char* weld_genome_organism(const weld_genome* genome);
WELD_API size_t weld_genome_sequence_count(const weld_genome* genome);
/* Total n-gram tokens over all sequences and all start offsets. */
WELD_API weld_status weld_genome_ngram_count(const weld_genome* genome, int n, uint64_t* out);
WELD_API weld_status weld_genome_write_sentences(const weld_genome* genome, int n, const char* path);

/* ---- embeddings -------------------------------------------------------- */

typedef struct weld_embedding_config {
  uint32_t dim;
  uint32_t window;
  double subsample;
  uint32_t negatives;
  uint32_t epochs;
  double initial_lr;
  uint64_t min_count;
  uint64_t seed;
  int fixed_window;
  uint32_t threads;
} weld_embedding_config;

/* workflow: "natural" (window 10, min_count 5) or "genome" (window 40, min_count 1). */
WELD_API weld_status weld_embedding_config_default(const char* workflow, weld_embedding_config* out);

typedef struct weld_model weld_model;

WELD_API weld_status weld_model_train(const char* sentences_path, const weld_embedding_config* config,
                                      weld_model** out);
WELD_API weld_status weld_model_load(const char* path, weld_model** out);
WELD_API weld_status weld_model_save(const weld_model* model, const char* path);
WELD_API weld_status weld_model_export_text(const weld_model* model, const char* path);
WELD_API void weld_model_free(weld_model* model);
WELD_API uint32_t weld_model_dim(const weld_model* model);
WELD_API size_t weld_model_vocab_size(const weld_model* model);
/* Averaged word vector; `out` must hold weld_model_dim() doubles. */
WELD_API weld_status weld_model_word_vector(const weld_model* model, const char* word, double* out,
                                            size_t len);
WELD_API weld_status weld_cosine(const double* u, const double* v, size_t len, double* out);

/* ---- alignment --------------------------------------------------------- */

typedef struct weld_table weld_table;

/* Aligns every language in `languages` against `pivot` and keeps pivot words
 * aligned in all of them. The pivot itself maps onto its own words. */
WELD_API weld_status weld_align(const weld_corpus* corpus, const char* pivot, const char* const* languages,
                                size_t language_count, double threshold, uint32_t iterations,
                                uint64_t min_count, weld_table** out);
WELD_API weld_status weld_table_load(const char* path, weld_table** out);
WELD_API weld_status weld_table_save(const weld_table* table, const char* path);
WELD_API void weld_table_free(weld_table* table);
WELD_API size_t weld_table_pivot_count(const weld_table* table);
WELD_API size_t weld_table_entry_count(const weld_table* table);

/* ---- divergence -------------------------------------------------------- */

typedef struct weld_matrix weld_matrix;

WELD_API weld_status weld_jsd(const double* p, const double* q, size_t len, double* out);

/* models[i] belongs to languages[i]. With strict != 0, any pivot word that a
 * model cannot resolve is an error naming the missing words; otherwise such
 * pivots are dropped for every language and reported via `warnings` (may be
 * NULL; newline-separated, caller frees). */
WELD_API weld_status weld_distance_matrix(const weld_model* const* models, const char* const* languages,
                                          size_t language_count, const weld_table* table, int strict,
                                          weld_matrix** out, char** warnings);
WELD_API weld_status weld_matrix_load_json(const char* path, weld_matrix** out);
WELD_API weld_status weld_matrix_save_json(const weld_matrix* matrix, const char* path);
WELD_API weld_status weld_matrix_save_tsv(const weld_matrix* matrix, const char* path);
WELD_API void weld_matrix_free(weld_matrix* matrix);
WELD_API size_t weld_matrix_size(const weld_matrix* matrix);
WELD_API const char* weld_matrix_label(const weld_matrix* matrix, size_t i);
WELD_API double weld_matrix_value(const weld_matrix* matrix, size_t i, size_t j);

/* ---- clustering -------------------------------------------------------- */

typedef struct weld_tree weld_tree;

WELD_API weld_status weld_upgma(const weld_matrix* matrix, weld_tree** out);
WELD_API void weld_tree_free(weld_tree* tree);
WELD_API weld_status weld_tree_newick(const weld_tree* tree, char** out);
/* format: "svg" or "dot". annotations_path may be NULL. */
WELD_API weld_status weld_tree_render(const weld_tree* tree, const char* format,
                                      const char* annotations_path, char** out, char** warnings);

/* ---- pipeline ---------------------------------------------------------- */

typedef struct weld_run_options {
  const char* output_dir; /* NULL keeps the config value */
  int has_seed;
  uint64_t seed;
  uint32_t threads; /* 0 keeps the config value */
} weld_run_options;

/* Runs the workflow described by the config file and writes manifest.json
 * into the output directory; its path is returned through manifest_path. */
WELD_API weld_status weld_run(const char* config_path, const weld_run_options* options,
                              char** manifest_path);
/* 1 when every artifact listed in the manifest exists with a matching hash. */
WELD_API weld_status weld_manifest_verify(const char* manifest_path, int* ok, char** problems);

#ifdef __cplusplus
}
#endif

#endif /* WELD_WELD_H */
