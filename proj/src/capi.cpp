// Copyright 2026 The weld Authors
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

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "alignment.hpp"
#include "clustering.hpp"
#include "corpus.hpp"
#include "divergence.hpp"
#include "embedding.hpp"
#include "error.hpp"
#include "genome.hpp"
#include "pipeline.hpp"
#include "weld/weld.h"

struct weld_corpus {
  weld::ParallelCorpus corpus;
  std::vector<std::size_t> dropped;
};
struct weld_vocab {
  weld::Vocabulary vocab;
};
struct weld_genome {
  weld::CodingRegionSet set;
};
struct weld_model {
  weld::EmbeddingModel model;
};
struct weld_table {
  weld::AlignmentTable table;
};
struct weld_matrix {
  weld::DistanceMatrix matrix;
};
struct weld_tree {
  weld::Dendrogram tree;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_stage;

weld_status status_for(weld::ErrorCode code) {
  switch (code) {
    case weld::ErrorCode::InvalidArgument: return WELD_ERR_INVALID_ARGUMENT;
    case weld::ErrorCode::Io: return WELD_ERR_IO;
    case weld::ErrorCode::Parse: return WELD_ERR_PARSE;
    case weld::ErrorCode::NotFound: return WELD_ERR_NOT_FOUND;
    case weld::ErrorCode::Numeric: return WELD_ERR_NUMERIC;
    case weld::ErrorCode::Format: return WELD_ERR_FORMAT;
    case weld::ErrorCode::Config: return WELD_ERR_CONFIG;
  }
  return WELD_ERR_INTERNAL;
}

template <typename Fn>
weld_status guarded(Fn&& fn) noexcept {
  last_error.clear();
  last_stage.clear();
  try {
    fn();
    return WELD_OK;
  } catch (const weld::StageError& e) {
    last_error = e.what();
    last_stage = e.stage();
    return status_for(e.code());
  } catch (const weld::Error& e) {
    last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown exception";
  }
  return WELD_ERR_INTERNAL;
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw weld::Error(weld::ErrorCode::InvalidArgument, std::string(name) + " is NULL");
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::vector<weld::TokenSeq> read_sentences(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw weld::Error(weld::ErrorCode::Io, std::string("cannot read ") + path);
  std::vector<weld::TokenSeq> sentences;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    weld::TokenSeq s;
    for (std::string t; ss >> t;) s.push_back(std::move(t));
    if (!s.empty()) sentences.push_back(std::move(s));
  }
  return sentences;
}

void write_sentences(std::span<const weld::TokenSeq> sentences, const char* path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw weld::Error(weld::ErrorCode::Io, std::string("cannot write ") + path);
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
    out << '\n';
  }
}

weld::EmbeddingConfig from_c(const weld_embedding_config& c) {
  weld::EmbeddingConfig e;
  e.dim = c.dim;
  e.window = c.window;
  e.subsample = c.subsample;
  e.negatives = c.negatives;
  e.epochs = c.epochs;
  e.initial_lr = c.initial_lr;
  e.min_count = c.min_count;
  e.seed = c.seed;
  e.fixed_window = c.fixed_window != 0;
  e.threads = c.threads;
  return e;
}

}  // namespace

extern "C" {

const char* weld_version(void) { return weld::kToolVersion; }
const char* weld_last_error(void) { return last_error.c_str(); }
const char* weld_last_error_stage(void) { return last_stage.c_str(); }

const char* weld_status_string(weld_status status) {
  switch (status) {
    case WELD_OK: return "ok";
    case WELD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WELD_ERR_IO: return "io error";
    case WELD_ERR_PARSE: return "parse error";
    case WELD_ERR_NOT_FOUND: return "not found";
    case WELD_ERR_NUMERIC: return "numeric error";
    case WELD_ERR_FORMAT: return "format error";
    case WELD_ERR_CONFIG: return "config error";
    case WELD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void weld_string_free(char* s) { std::free(s); }

// corpus

weld_status weld_corpus_load(const char* directory, const char* format, const char* punctuation,
                             weld_corpus** out) {
  return guarded([&] {
    require(directory, "directory");
    require(out, "out");
    weld::TokenizeOptions options;
    if (punctuation != nullptr && std::strcmp(punctuation, "split") == 0)
      options.punctuation = weld::PunctuationMode::Split;
    else if (punctuation != nullptr && std::strcmp(punctuation, "delete") != 0)
      throw weld::Error(weld::ErrorCode::InvalidArgument, "punctuation must be 'delete' or 'split'");
    auto loaded = weld::load_verse_aligned(directory, weld::parse_corpus_format(format ? format : "tsv"), options);
    auto handle = std::make_unique<weld_corpus>();
    for (const auto& l : loaded.corpus.languages()) handle->dropped.push_back(loaded.dropped.at(l));
    handle->corpus = std::move(loaded.corpus);
    *out = handle.release();
  });
}

void weld_corpus_free(weld_corpus* corpus) { delete corpus; }
size_t weld_corpus_language_count(const weld_corpus* c) { return c ? c->corpus.languages().size() : 0; }
const char* weld_corpus_language(const weld_corpus* c, size_t i) {
  return c && i < c->corpus.languages().size() ? c->corpus.languages()[i].c_str() : nullptr;
}
size_t weld_corpus_verse_count(const weld_corpus* c) { return c ? c->corpus.verse_count() : 0; }
size_t weld_corpus_dropped(const weld_corpus* c, size_t i) {
  return c && i < c->dropped.size() ? c->dropped[i] : 0;
}

weld_status weld_corpus_write_sentences(const weld_corpus* corpus, const char* language, const char* path) {
  return guarded([&] {
    require(corpus, "corpus");
    require(language, "language");
    require(path, "path");
    write_sentences(corpus->corpus.sentences(language), path);
  });
}

weld_status weld_tokenize(const char* text, char** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    std::string joined;
    for (const auto& t : weld::tokenize_natural(text)) joined += (joined.empty() ? "" : " ") + t;
    *out = dup_string(joined);
  });
}

// vocabulary

weld_status weld_vocab_build(const char* sentences_path, uint64_t min_count, weld_vocab** out) {
  return guarded([&] {
    require(sentences_path, "sentences_path");
    require(out, "out");
    const auto sentences = read_sentences(sentences_path);
    *out = new weld_vocab{weld::Vocabulary::build(sentences, min_count)};
  });
}

weld_status weld_vocab_load(const char* path, weld_vocab** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new weld_vocab{weld::Vocabulary::load(path)};
  });
}

weld_status weld_vocab_save(const weld_vocab* vocab, const char* path) {
  return guarded([&] {
    require(vocab, "vocab");
    require(path, "path");
    vocab->vocab.save(path);
  });
}

void weld_vocab_free(weld_vocab* vocab) { delete vocab; }
size_t weld_vocab_size(const weld_vocab* v) { return v ? v->vocab.size() : 0; }
const char* weld_vocab_word(const weld_vocab* v, size_t id) {
  return v && id < v->vocab.size() ? v->vocab.word(static_cast<weld::WordId>(id)).c_str() : nullptr;
}
uint64_t weld_vocab_count(const weld_vocab* v, size_t id) {
  return v && id < v->vocab.size() ? v->vocab.count(static_cast<weld::WordId>(id)) : 0;
}

// genome

weld_status weld_genome_load(const char* path, const char* format, const char* policy, weld_genome** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto p = weld::InvalidBasePolicy::Reject;
    if (policy != nullptr && std::strcmp(policy, "clean") == 0) p = weld::InvalidBasePolicy::Clean;
    else if (policy != nullptr && std::strcmp(policy, "reject") != 0)
      throw weld::Error(weld::ErrorCode::InvalidArgument, "policy must be 'reject' or 'clean'");
    *out = new weld_genome{weld::load_coding_regions(path, weld::parse_genome_format(format ? format : "fasta"), p)};
  });
}

void weld_genome_free(weld_genome* genome) { delete genome; }
const char* weld_genome_organism(const weld_genome* g) { return g ? g->set.organism.c_str() : nullptr; }
size_t weld_genome_sequence_count(const weld_genome* g) { return g ? g->set.sequences.size() : 0; }

weld_status weld_genome_ngram_count(const weld_genome* genome, int n, uint64_t* out) {
  return guarded([&] {
    require(genome, "genome");
    require(out, "out");
    uint64_t total = 0;
    for (const auto& s : genome->set.sequences) total += weld::ngram_token_count(s.size(), n);
    *out = total;
  });
}

weld_status weld_genome_write_sentences(const weld_genome* genome, int n, const char* path) {
  return guarded([&] {
    require(genome, "genome");
    require(path, "path");
    std::vector<weld::TokenSeq> all;
    for (const auto& s : genome->set.sequences)
      for (auto& sentence : weld::genome_ngram_sentences(s, n)) all.push_back(std::move(sentence));
    write_sentences(all, path);
  });
}

// embeddings

weld_status weld_embedding_config_default(const char* workflow, weld_embedding_config* out) {
  return guarded([&] {
    require(out, "out");
    const std::string w = workflow ? workflow : "natural";
    if (w != "natural" && w != "genome")
      throw weld::Error(weld::ErrorCode::InvalidArgument, "workflow must be 'natural' or 'genome'");
    const auto e = w == "natural" ? weld::EmbeddingConfig::natural() : weld::EmbeddingConfig::genome();
    *out = weld_embedding_config{e.dim,       e.window, e.subsample,
                                 e.negatives, e.epochs, e.initial_lr,
                                 e.min_count, e.seed,   e.fixed_window ? 1 : 0,
                                 e.threads};
  });
}

weld_status weld_model_train(const char* sentences_path, const weld_embedding_config* config, weld_model** out) {
  return guarded([&] {
    require(sentences_path, "sentences_path");
    require(config, "config");
    require(out, "out");
    const auto sentences = read_sentences(sentences_path);
    *out = new weld_model{weld::train(sentences, from_c(*config))};
  });
}

weld_status weld_model_load(const char* path, weld_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new weld_model{weld::load_model(path)};
  });
}

weld_status weld_model_save(const weld_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    weld::save_model(model->model, path);
  });
}

weld_status weld_model_export_text(const weld_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    weld::export_text(model->model, path);
  });
}

void weld_model_free(weld_model* model) { delete model; }
uint32_t weld_model_dim(const weld_model* m) { return m ? m->model.dim() : 0; }
size_t weld_model_vocab_size(const weld_model* m) { return m ? m->model.vocab().size() : 0; }

weld_status weld_model_word_vector(const weld_model* model, const char* word, double* out, size_t len) {
  return guarded([&] {
    require(model, "model");
    require(word, "word");
    require(out, "out");
    if (len < model->model.dim())
      throw weld::Error(weld::ErrorCode::InvalidArgument, "output buffer shorter than model dimension");
    const auto v = weld::word_vector(model->model, word);
    std::copy(v.begin(), v.end(), out);
  });
}

weld_status weld_cosine(const double* u, const double* v, size_t len, double* out) {
  return guarded([&] {
    require(u, "u");
    require(v, "v");
    require(out, "out");
    *out = weld::cosine({u, len}, {v, len});
  });
}

// alignment

weld_status weld_align(const weld_corpus* corpus, const char* pivot, const char* const* languages,
                       size_t language_count, double threshold, uint32_t iterations, uint64_t min_count,
                       weld_table** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(pivot, "pivot");
    require(out, "out");
    if (language_count > 0) require(languages, "languages");
    std::vector<std::string> langs;
    for (size_t i = 0; i < language_count; ++i) {
      require(languages[i], "language");
      langs.emplace_back(languages[i]);
    }
    if (langs.empty()) langs = corpus->corpus.languages();
    const auto& c = corpus->corpus;
    const auto pivot_vocab = weld::Vocabulary::build(c.sentences(pivot), min_count);
    std::map<std::string, std::vector<weld::AlignmentEntry>> per_language;
    for (const auto& lang : langs) {
      auto& entries = per_language[lang];
      if (lang == pivot) {
        for (const auto& w : pivot_vocab.words()) entries.push_back({w, w, 1.0});
      } else {
        entries = weld::extract_alignment(weld::train_translation_model(c, pivot, lang, iterations, min_count),
                                          threshold);
      }
    }
    *out = new weld_table{weld::intersect_tables(per_language, langs, pivot_vocab)};
  });
}

weld_status weld_table_load(const char* path, weld_table** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new weld_table{weld::AlignmentTable::load(path)};
  });
}

weld_status weld_table_save(const weld_table* table, const char* path) {
  return guarded([&] {
    require(table, "table");
    require(path, "path");
    table->table.save(path);
  });
}

void weld_table_free(weld_table* table) { delete table; }
size_t weld_table_pivot_count(const weld_table* t) { return t ? t->table.pivot_count() : 0; }
size_t weld_table_entry_count(const weld_table* t) { return t ? t->table.entry_count() : 0; }

// divergence

weld_status weld_jsd(const double* p, const double* q, size_t len, double* out) {
  return guarded([&] {
    require(p, "p");
    require(q, "q");
    require(out, "out");
    *out = weld::jsd({p, len}, {q, len});
  });
}

weld_status weld_distance_matrix(const weld_model* const* models, const char* const* languages,
                                 size_t language_count, const weld_table* table, int strict,
                                 weld_matrix** out, char** warnings) {
  return guarded([&] {
    require(models, "models");
    require(languages, "languages");
    require(table, "table");
    require(out, "out");
    weld::ModelSet set;
    std::vector<std::string> langs;
    for (size_t i = 0; i < language_count; ++i) {
      require(models[i], "model");
      require(languages[i], "language");
      langs.emplace_back(languages[i]);
      set[langs.back()] = &models[i]->model;
    }
    if (strict) {
      const auto resolved = weld::resolve_pivots(table->table, set, langs);
      std::string missing;
      for (const auto& [lang, words] : resolved.missing) {
        if (words.empty()) continue;
        missing += (missing.empty() ? "" : "; ") + lang + ":";
        for (const auto& w : words) missing += " " + w;
      }
      if (!missing.empty())
        throw weld::Error(weld::ErrorCode::NotFound, "alignment targets missing from model vocabularies: " + missing);
    }
    weld::DivergenceReport report;
    auto matrix = weld::distance_matrix(set, table->table, langs, weld::PivotScope::Global, &report);
    if (warnings != nullptr) {
      std::vector<std::string> lines = report.warnings;
      for (const auto& [lang, words] : report.missing)
        if (!words.empty())
          lines.push_back(std::to_string(words.size()) + " pivot words dropped: missing in '" + lang + "'");
      *warnings = dup_string(join_lines(lines));
    }
    *out = new weld_matrix{std::move(matrix)};
  });
}

weld_status weld_matrix_load_json(const char* path, weld_matrix** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new weld_matrix{weld::DistanceMatrix::load_json(path)};
  });
}

weld_status weld_matrix_save_json(const weld_matrix* matrix, const char* path) {
  return guarded([&] {
    require(matrix, "matrix");
    require(path, "path");
    matrix->matrix.save_json(path);
  });
}

weld_status weld_matrix_save_tsv(const weld_matrix* matrix, const char* path) {
  return guarded([&] {
    require(matrix, "matrix");
    require(path, "path");
    matrix->matrix.save_tsv(path);
  });
}

void weld_matrix_free(weld_matrix* matrix) { delete matrix; }
size_t weld_matrix_size(const weld_matrix* m) { return m ? m->matrix.size() : 0; }
const char* weld_matrix_label(const weld_matrix* m, size_t i) {
  return m && i < m->matrix.size() ? m->matrix.labels()[i].c_str() : nullptr;
}
double weld_matrix_value(const weld_matrix* m, size_t i, size_t j) {
  return m && i < m->matrix.size() && j < m->matrix.size() ? m->matrix.at(i, j) : 0.0;
}

// clustering

weld_status weld_upgma(const weld_matrix* matrix, weld_tree** out) {
  return guarded([&] {
    require(matrix, "matrix");
    require(out, "out");
    *out = new weld_tree{weld::upgma(matrix->matrix)};
  });
}

void weld_tree_free(weld_tree* tree) { delete tree; }

weld_status weld_tree_newick(const weld_tree* tree, char** out) {
  return guarded([&] {
    require(tree, "tree");
    require(out, "out");
    *out = dup_string(weld::to_newick(tree->tree));
  });
}

weld_status weld_tree_render(const weld_tree* tree, const char* format, const char* annotations_path,
                             char** out, char** warnings) {
  return guarded([&] {
    require(tree, "tree");
    require(format, "format");
    require(out, "out");
    std::optional<weld::Annotations> annotations;
    if (annotations_path != nullptr) annotations = weld::load_annotations(annotations_path);
    const auto doc = weld::render_dendrogram(tree->tree, weld::parse_render_format(format),
                                             annotations ? &*annotations : nullptr);
    char* text = dup_string(doc.text);
    if (warnings != nullptr) {
      try {
        *warnings = dup_string(join_lines(doc.warnings));
      } catch (...) {
        std::free(text);
        throw;
      }
    }
    *out = text;
  });
}

// pipeline

weld_status weld_run(const char* config_path, const weld_run_options* options, char** manifest_path) {
  return guarded([&] {
    require(config_path, "config_path");
    auto config = weld::RunConfig::load(config_path);
    if (options != nullptr) {
      if (options->output_dir != nullptr) config.output_dir = options->output_dir;
      if (options->has_seed) config.seed = config.embedding.seed = options->seed;
      if (options->threads > 0) config.threads = options->threads;
    }
    weld::run(config);
    if (manifest_path != nullptr) *manifest_path = dup_string((config.output_dir / "manifest.json").string());
  });
}

weld_status weld_manifest_verify(const char* manifest_path, int* ok, char** problems) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(ok, "ok");
    const std::filesystem::path path(manifest_path);
    const auto found = weld::RunManifest::load(path).verify(path.parent_path());
    *ok = found.empty() ? 1 : 0;
    if (problems != nullptr) *problems = dup_string(join_lines(found));
  });
}

}  // extern "C"
