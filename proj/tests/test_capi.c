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

/* Exercises the public header from plain C. */
#define _POSIX_C_SOURCE 200809L

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>
#include <unistd.h>

#include "weld/weld.h"

static int failures = 0;

#define CHECK(cond)                                                              \
  do {                                                                           \
    if (!(cond)) {                                                               \
      fprintf(stderr, "%s:%d: CHECK failed: %s (%s)\n", __FILE__, __LINE__, #cond, \
              weld_last_error());                                                \
      ++failures;                                                                \
    }                                                                            \
  } while (0)

static char root[256];

static const char* at(const char* name) {
  static char buf[8][512];
  static int next = 0;
  char* out = buf[next++ % 8];
  snprintf(out, 512, "%s/%s", root, name);
  return out;
}

static void write_text(const char* path, const char* text) {
  FILE* f = fopen(path, "wb");
  fputs(text, f);
  fclose(f);
}

static void write_corpus(void) {
  static const char* langs[] = {"aa", "bb", "cc"};
  static const char* prefix[] = {"", "b", "c"};
  mkdir(at("corpus"), 0755);
  for (int l = 0; l < 3; ++l) {
    char path[512];
    snprintf(path, sizeof path, "%s/corpus/%s.tsv", root, langs[l]);
    FILE* f = fopen(path, "wb");
    unsigned state = 12345u;
    for (int v = 0; v < 200; ++v) {
      fprintf(f, "v%d\t", v);
      const unsigned topic = (state = state * 1103515245u + 12345u) >> 16 & 3u;
      for (int k = 0; k < 6; ++k) {
        state = state * 1103515245u + 12345u;
        fprintf(f, "%sw%u ", prefix[l], topic * 8u + (state >> 16) % 8u);
      }
      fputc('\n', f);
    }
    fclose(f);
  }
}

static void test_basics(void) {
  char* s = NULL;
  CHECK(strlen(weld_version()) > 0);
  CHECK(weld_tokenize("Hello, World!", &s) == WELD_OK);
  CHECK(s != NULL && strcmp(s, "hello world") == 0);
  weld_string_free(s);

  double out = -1.0;
  const double p[] = {0.5, 0.5}, q[] = {1.0, 0.0};
  CHECK(weld_jsd(p, q, 2, &out) == WELD_OK);
  CHECK(fabs(out - 0.311278124459132843) < 1e-12);
  CHECK(weld_jsd(p, p, 2, &out) == WELD_OK && out == 0.0);
  const double bad[] = {0.9, 0.9};
  CHECK(weld_jsd(p, bad, 2, &out) == WELD_ERR_INVALID_ARGUMENT);
  CHECK(strlen(weld_last_error()) > 0);

  CHECK(weld_tokenize(NULL, &s) == WELD_ERR_INVALID_ARGUMENT);
  CHECK(strstr(weld_last_error(), "text") != NULL);
  CHECK(strcmp(weld_status_string(WELD_ERR_IO), "") != 0);

  weld_embedding_config c;
  CHECK(weld_embedding_config_default("genome", &c) == WELD_OK);
  CHECK(c.window == 40 && c.min_count == 1);
  CHECK(weld_embedding_config_default("natural", &c) == WELD_OK);
  CHECK(c.window == 10 && c.min_count == 5);
  CHECK(weld_embedding_config_default("poetry", &c) != WELD_OK);
}

static void test_genome(void) {
  write_text(at("g.fa"), ">a\nATGCGTA\n>b\nACGT\n");
  weld_genome* g = NULL;
  uint64_t n = 0;
  CHECK(weld_genome_load(at("g.fa"), "fasta", "reject", &g) == WELD_OK);
  CHECK(strcmp(weld_genome_organism(g), "g") == 0);
  CHECK(weld_genome_sequence_count(g) == 2);
  CHECK(weld_genome_ngram_count(g, 3, &n) == WELD_OK && n == 5 + 2);
  CHECK(weld_genome_ngram_count(g, 9, &n) == WELD_ERR_INVALID_ARGUMENT);
  CHECK(weld_genome_write_sentences(g, 3, at("g3.txt")) == WELD_OK);
  weld_genome_free(g);

  write_text(at("bad.fa"), ">a\nACGNT\n");
  CHECK(weld_genome_load(at("bad.fa"), "fasta", "reject", &g) != WELD_OK);
  CHECK(weld_genome_load(at("missing.fa"), "fasta", "reject", &g) == WELD_ERR_IO);
}

static void test_natural_chain(void) {
  weld_corpus* corpus = NULL;
  CHECK(weld_corpus_load(at("corpus"), "tsv", "delete", &corpus) == WELD_OK);
  CHECK(weld_corpus_language_count(corpus) == 3);
  CHECK(strcmp(weld_corpus_language(corpus, 1), "bb") == 0);
  CHECK(weld_corpus_language(corpus, 9) == NULL);
  CHECK(weld_corpus_verse_count(corpus) == 200);
  CHECK(weld_corpus_dropped(corpus, 0) == 0);

  const char* langs[] = {"aa", "bb", "cc"};
  weld_model* models[3] = {NULL, NULL, NULL};
  weld_embedding_config c;
  weld_embedding_config_default("natural", &c);
  c.dim = 8;
  c.epochs = 2;
  c.min_count = 1;
  c.seed = 4;
  for (int i = 0; i < 3; ++i) {
    char name[64];
    snprintf(name, sizeof name, "%s.txt", langs[i]);
    CHECK(weld_corpus_write_sentences(corpus, langs[i], at(name)) == WELD_OK);
    CHECK(weld_model_train(at(name), &c, &models[i]) == WELD_OK);
  }
  CHECK(weld_corpus_write_sentences(corpus, "zz", at("zz.txt")) == WELD_ERR_NOT_FOUND);
  CHECK(weld_model_dim(models[0]) == 8);
  CHECK(weld_model_vocab_size(models[0]) == 32);

  weld_vocab* vocab = NULL;
  CHECK(weld_vocab_build(at("aa.txt"), 1, &vocab) == WELD_OK);
  CHECK(weld_vocab_size(vocab) == 32);
  CHECK(weld_vocab_count(vocab, 0) >= weld_vocab_count(vocab, 31));
  CHECK(weld_vocab_save(vocab, at("aa.vocab")) == WELD_OK);
  weld_vocab_free(vocab);

  double u[8], v[8], cos = 0.0;
  CHECK(weld_model_word_vector(models[0], "w1", u, 8) == WELD_OK);
  CHECK(weld_model_word_vector(models[1], "bw1", v, 8) == WELD_OK);
  CHECK(weld_model_word_vector(models[0], "w1", u, 4) == WELD_ERR_INVALID_ARGUMENT);
  CHECK(weld_model_word_vector(models[0], "nope", u, 8) == WELD_ERR_NOT_FOUND);
  CHECK(weld_cosine(u, v, 8, &cos) == WELD_OK && cos >= -1.0 && cos <= 1.0);

  CHECK(weld_model_save(models[0], at("aa.bin")) == WELD_OK);
  weld_model* loaded = NULL;
  CHECK(weld_model_load(at("aa.bin"), &loaded) == WELD_OK);
  CHECK(weld_model_vocab_size(loaded) == 32);
  CHECK(weld_model_export_text(loaded, at("aa.vec")) == WELD_OK);
  weld_model_free(loaded);

  weld_table* table = NULL;
  CHECK(weld_align(corpus, "aa", langs, 3, 0.3, 5, 1, &table) == WELD_OK);
  CHECK(weld_table_pivot_count(table) >= 2);
  CHECK(weld_table_entry_count(table) == 3 * weld_table_pivot_count(table));
  CHECK(weld_table_save(table, at("table.tsv")) == WELD_OK);

  weld_matrix* matrix = NULL;
  char* warnings = NULL;
  CHECK(weld_distance_matrix((const weld_model* const*)models, langs, 3, table, 1, &matrix, &warnings) == WELD_OK);
  CHECK(weld_matrix_size(matrix) == 3);
  CHECK(strcmp(weld_matrix_label(matrix, 2), "cc") == 0);
  CHECK(weld_matrix_value(matrix, 0, 0) == 0.0);
  CHECK(weld_matrix_value(matrix, 0, 1) == weld_matrix_value(matrix, 1, 0));
  weld_string_free(warnings);
  CHECK(weld_matrix_save_json(matrix, at("m.json")) == WELD_OK);
  CHECK(weld_matrix_save_tsv(matrix, at("m.tsv")) == WELD_OK);

  /* Swapped models: pivot targets of 'bb' are absent from the 'aa' model. */
  const weld_model* swapped[] = {models[1], models[0]};
  weld_matrix* none = NULL;
  CHECK(weld_distance_matrix(swapped, langs, 2, table, 1, &none, NULL) == WELD_ERR_NOT_FOUND);
  CHECK(strstr(weld_last_error(), "aa:") != NULL);
  CHECK(none == NULL);

  weld_tree* tree = NULL;
  char* newick = NULL;
  char* svg = NULL;
  CHECK(weld_upgma(matrix, &tree) == WELD_OK);
  CHECK(weld_tree_newick(tree, &newick) == WELD_OK);
  CHECK(newick != NULL && newick[strlen(newick) - 1] == ';');
  CHECK(weld_tree_render(tree, "svg", NULL, &svg, NULL) == WELD_OK);
  CHECK(svg != NULL && strstr(svg, "<svg") != NULL);
  CHECK(weld_tree_render(tree, "png", NULL, &svg, NULL) == WELD_ERR_INVALID_ARGUMENT);
  weld_string_free(newick);
  weld_string_free(svg);
  weld_tree_free(tree);

  weld_matrix* reloaded = NULL;
  CHECK(weld_matrix_load_json(at("m.json"), &reloaded) == WELD_OK);
  CHECK(weld_matrix_value(reloaded, 1, 2) == weld_matrix_value(matrix, 1, 2));
  weld_matrix_free(reloaded);

  weld_matrix_free(matrix);
  weld_table_free(table);
  for (int i = 0; i < 3; ++i) weld_model_free(models[i]);
  weld_corpus_free(corpus);
}

static void test_run(void) {
  write_text(at("run.json"),
             "{\"corpus\": {\"path\": \"corpus\"}, \"pivot\": \"aa\", \"output\": \"out\","
             " \"alignment\": {\"threshold\": 0.3, \"iterations\": 5},"
             " \"embedding\": {\"dim\": 8, \"epochs\": 1, \"min_count\": 1}}");
  weld_run_options opt = {NULL, 1, 9, 1};
  char* manifest = NULL;
  char* problems = NULL;
  int ok = 0;
  CHECK(weld_run(at("run.json"), &opt, &manifest) == WELD_OK);
  CHECK(manifest != NULL && strstr(manifest, "manifest.json") != NULL);
  CHECK(weld_manifest_verify(manifest, &ok, &problems) == WELD_OK);
  CHECK(ok == 1);
  weld_string_free(problems);
  weld_string_free(manifest);

  write_text(at("broken.json"), "{\"corpus\": {\"path\": \"nowhere\"}, \"pivot\": \"aa\", \"output\": \"out2\"}");
  CHECK(weld_run(at("broken.json"), NULL, &manifest) == WELD_ERR_IO);
  CHECK(strcmp(weld_last_error_stage(), "ingest") == 0);
  write_text(at("typo.json"), "{\"pivto\": \"aa\"}");
  CHECK(weld_run(at("typo.json"), NULL, &manifest) == WELD_ERR_CONFIG);
  CHECK(strcmp(weld_last_error_stage(), "") == 0);
}

int main(void) {
  snprintf(root, sizeof root, "/tmp/weld-capi-XXXXXX");
  if (mkdtemp(root) == NULL) return 2;
  write_corpus();
  test_basics();
  test_genome();
  test_natural_chain();
  test_run();
  char cmd[300];
  snprintf(cmd, sizeof cmd, "rm -rf '%s'", root);
  if (system(cmd) != 0) fprintf(stderr, "could not clean %s\n", root);
  if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
  else printf("all C API checks passed\n");
  return failures ? 1 : 0;
}
