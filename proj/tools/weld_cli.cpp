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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weld/weld.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStage = 1;
constexpr int kExitUsage = 2;

struct StageFailure {
  weld_status status;
  std::string stage;
};

struct Globals {
  std::string config;
  std::string out;
  uint64_t seed = 0;
  uint32_t threads = 0;
  bool seed_set = false;
};

void check(weld_status status, const std::string& stage) {
  if (status != WELD_OK) throw StageFailure{status, stage};
}

struct Freer {
  void operator()(char* s) const { weld_string_free(s); }
};
using OwnedString = std::unique_ptr<char, Freer>;

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
};
using Corpus = Handle<weld_corpus, weld_corpus_free>;
using Genome = Handle<weld_genome, weld_genome_free>;
using Model = Handle<weld_model, weld_model_free>;
using Table = Handle<weld_table, weld_table_free>;
using Matrix = Handle<weld_matrix, weld_matrix_free>;
using Tree = Handle<weld_tree, weld_tree_free>;
using Vocab = Handle<weld_vocab, weld_vocab_free>;

// Relative output paths land under --out when it is given.
std::string output_path(const Globals& g, const std::string& path) {
  fs::path p(path);
  if (!g.out.empty() && p.is_relative()) p = fs::path(g.out) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

void write_text(const std::string& path, const char* text, const std::string& stage) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "weld: [" << stage << "] cannot write " << path << "\n";
    throw StageFailure{WELD_ERR_IO, ""};
  }
}

void print_warnings(const char* warnings) {
  if (warnings == nullptr) return;
  std::string text(warnings);
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) std::cerr << "weld: warning: " << text.substr(start, end - start) << "\n";
    start = end + 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weld: word-embedding language divergence"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(weld_version()));

  Globals g;
  app.add_option("--config", g.config, "Declarative run configuration (JSON)");
  app.add_option("--out", g.out, "Output directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  for (auto* opt : app.get_options()) opt->configurable(false);
  app.fallthrough();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Tokenize a corpus or genome into sentence files");
  std::string corpus_dir, corpus_format = "tsv", punctuation = "delete";
  std::string genome_path, genome_format = "fasta", base_policy = "reject";
  std::vector<int> ngrams;
  auto* ingest_src = ingest->add_option_group("source");
  ingest_src->add_option("--corpus", corpus_dir, "Directory of verse-aligned files")->check(CLI::ExistingDirectory);
  ingest_src->add_option("--genome", genome_path, "Coding-region file")->check(CLI::ExistingFile);
  ingest_src->require_option(1);
  ingest->add_option("--format", corpus_format, "Corpus format")->check(CLI::IsMember({"tsv", "bible-xml"}));
  ingest->add_option("--punctuation", punctuation, "Punctuation handling")->check(CLI::IsMember({"delete", "split"}));
  ingest->add_option("--genome-format", genome_format, "Genome format")->check(CLI::IsMember({"fasta", "tsv"}));
  ingest->add_option("--invalid-bases", base_policy, "Invalid base policy")->check(CLI::IsMember({"reject", "clean"}));
  ingest->add_option("--ngram", ngrams, "n-gram sizes")->check(CLI::Range(3, 6));

  // train
  auto* train = app.add_subcommand("train", "Train a skip-gram model on a sentences file");
  std::string sentences, model_out, vocab_out, text_out, workflow = "natural";
  train->add_option("--sentences", sentences, "One sentence per line")->required()->check(CLI::ExistingFile);
  train->add_option("--output", model_out, "Binary model path")->required();
  train->add_option("--vocab", vocab_out, "Also write the vocabulary TSV");
  train->add_option("--text", text_out, "Also export vectors as text");
  train->add_option("--workflow", workflow, "Hyperparameter defaults")->check(CLI::IsMember({"natural", "genome"}));
  weld_embedding_config cfg{};
  weld_embedding_config_default("natural", &cfg);
  auto* dim_opt = train->add_option("--dim", cfg.dim, "Embedding dimension");
  auto* window_opt = train->add_option("--window", cfg.window, "Maximum window");
  auto* sub_opt = train->add_option("--subsample", cfg.subsample, "Subsampling threshold");
  auto* neg_opt = train->add_option("--negatives", cfg.negatives, "Negative samples");
  auto* epochs_opt = train->add_option("--epochs", cfg.epochs, "Epochs");
  auto* lr_opt = train->add_option("--lr", cfg.initial_lr, "Initial learning rate");
  auto* min_opt = train->add_option("--min-count", cfg.min_count, "Minimum word count");
  bool fixed_window = false;
  train->add_flag("--fixed-window", fixed_window, "Use the full window for every position");

  // align
  auto* align = app.add_subcommand("align", "Build a pivot alignment table");
  std::string align_dir, align_format = "tsv", align_punct = "delete", pivot, table_out;
  std::vector<std::string> languages;
  double threshold = 0.5;
  uint32_t iterations = 10;
  uint64_t align_min = 1;
  align->add_option("--corpus", align_dir, "Directory of verse-aligned files")->required()->check(CLI::ExistingDirectory);
  align->add_option("--format", align_format, "Corpus format")->check(CLI::IsMember({"tsv", "bible-xml"}));
  align->add_option("--punctuation", align_punct, "Punctuation handling")->check(CLI::IsMember({"delete", "split"}));
  align->add_option("--pivot", pivot, "Pivot language")->required();
  align->add_option("--languages", languages, "Languages to align (default: all)")->delimiter(',');
  align->add_option("--threshold", threshold, "Minimum alignment score");
  align->add_option("--iterations", iterations, "EM iterations");
  align->add_option("--min-count", align_min, "Minimum word count");
  align->add_option("--output", table_out, "Table TSV path")->required();

  // diverge
  auto* diverge = app.add_subcommand("diverge", "Compute the pairwise divergence matrix");
  std::string table_in, matrix_out, matrix_tsv;
  std::vector<std::string> model_specs;
  bool strict = false;
  diverge->add_option("--table", table_in, "Alignment table TSV")->required()->check(CLI::ExistingFile);
  diverge->add_option("--model", model_specs, "LANG=model.bin, repeated")->required();
  diverge->add_option("--output", matrix_out, "Matrix JSON path")->required();
  diverge->add_option("--tsv", matrix_tsv, "Also write the matrix as TSV");
  diverge->add_flag("--strict", strict, "Fail when a pivot word cannot be resolved");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "UPGMA clustering of a distance matrix");
  std::string matrix_in, newick_out, svg_out, dot_out, annotations;
  cluster->add_option("--input", matrix_in, "Matrix JSON")->required()->check(CLI::ExistingFile);
  cluster->add_option("--newick", newick_out, "Newick output path");
  cluster->add_option("--svg", svg_out, "SVG output path");
  cluster->add_option("--dot", dot_out, "Graphviz output path");
  cluster->add_option("--annotations", annotations, "label<TAB>family[<TAB>subfamily]")->check(CLI::ExistingFile);

  // run
  auto* run = app.add_subcommand("run", "Run a full workflow from --config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  g.seed_set = seed_opt->count() > 0;

  std::string stage;
  try {
    if (ingest->parsed()) {
      stage = "ingest";
      if (!corpus_dir.empty()) {
        Corpus corpus;
        check(weld_corpus_load(corpus_dir.c_str(), corpus_format.c_str(), punctuation.c_str(), corpus.out()), stage);
        for (size_t i = 0; i < weld_corpus_language_count(corpus.ptr); ++i) {
          const std::string lang = weld_corpus_language(corpus.ptr, i);
          const auto path = output_path(g, "sentences/" + lang + ".txt");
          check(weld_corpus_write_sentences(corpus.ptr, lang.c_str(), path.c_str()), stage);
          std::cout << lang << "\t" << weld_corpus_verse_count(corpus.ptr) << " verses\t"
                    << weld_corpus_dropped(corpus.ptr, i) << " dropped\t" << path << "\n";
        }
      } else {
        Genome genome;
        check(weld_genome_load(genome_path.c_str(), genome_format.c_str(), base_policy.c_str(), genome.out()), stage);
        if (ngrams.empty()) ngrams = {3, 4, 5, 6};
        const std::string org = weld_genome_organism(genome.ptr);
        for (int n : ngrams) {
          uint64_t tokens = 0;
          check(weld_genome_ngram_count(genome.ptr, n, &tokens), stage);
          const auto path = output_path(g, "sentences/" + org + ".n" + std::to_string(n) + ".txt");
          check(weld_genome_write_sentences(genome.ptr, n, path.c_str()), stage);
          std::cout << org << "\tn=" << n << "\t" << weld_genome_sequence_count(genome.ptr) << " sequences\t"
                    << tokens << " tokens\t" << path << "\n";
        }
      }
    } else if (train->parsed()) {
      stage = "train";
      weld_embedding_config c{};
      check(weld_embedding_config_default(workflow.c_str(), &c), stage);
      if (dim_opt->count()) c.dim = cfg.dim;
      if (window_opt->count()) c.window = cfg.window;
      if (sub_opt->count()) c.subsample = cfg.subsample;
      if (neg_opt->count()) c.negatives = cfg.negatives;
      if (epochs_opt->count()) c.epochs = cfg.epochs;
      if (lr_opt->count()) c.initial_lr = cfg.initial_lr;
      if (min_opt->count()) c.min_count = cfg.min_count;
      if (fixed_window) c.fixed_window = 1;
      if (g.seed_set) c.seed = g.seed;
      if (g.threads > 0) c.threads = g.threads;
      Model model;
      check(weld_model_train(sentences.c_str(), &c, model.out()), stage);
      check(weld_model_save(model.ptr, output_path(g, model_out).c_str()), stage);
      if (!vocab_out.empty()) {
        Vocab vocab;
        check(weld_vocab_build(sentences.c_str(), c.min_count, vocab.out()), stage);
        check(weld_vocab_save(vocab.ptr, output_path(g, vocab_out).c_str()), stage);
      }
      if (!text_out.empty()) check(weld_model_export_text(model.ptr, output_path(g, text_out).c_str()), stage);
      std::cout << weld_model_vocab_size(model.ptr) << " words x " << weld_model_dim(model.ptr) << "\n";
    } else if (align->parsed()) {
      stage = "align";
      Corpus corpus;
      check(weld_corpus_load(align_dir.c_str(), align_format.c_str(), align_punct.c_str(), corpus.out()), stage);
      std::vector<const char*> langs;
      for (const auto& l : languages) langs.push_back(l.c_str());
      Table table;
      check(weld_align(corpus.ptr, pivot.c_str(), langs.data(), langs.size(), threshold, iterations, align_min,
                       table.out()),
            stage);
      check(weld_table_save(table.ptr, output_path(g, table_out).c_str()), stage);
      std::cout << weld_table_pivot_count(table.ptr) << " pivot words aligned\n";
    } else if (diverge->parsed()) {
      stage = "diverge";
      std::vector<std::string> langs;
      std::vector<Model> models;
      for (const auto& spec : model_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
          std::cerr << "weld: --model expects LANG=PATH, got '" << spec << "'\n";
          return kExitUsage;
        }
        langs.push_back(spec.substr(0, eq));
        models.emplace_back();
        check(weld_model_load(spec.substr(eq + 1).c_str(), models.back().out()), stage);
      }
      Table table;
      check(weld_table_load(table_in.c_str(), table.out()), stage);
      std::vector<const weld_model*> model_ptrs;
      std::vector<const char*> lang_ptrs;
      for (std::size_t i = 0; i < models.size(); ++i) {
        model_ptrs.push_back(models[i].ptr);
        lang_ptrs.push_back(langs[i].c_str());
      }
      Matrix matrix;
      char* warnings = nullptr;
      check(weld_distance_matrix(model_ptrs.data(), lang_ptrs.data(), langs.size(), table.ptr, strict ? 1 : 0,
                                 matrix.out(), &warnings),
            stage);
      OwnedString owned(warnings);
      print_warnings(warnings);
      check(weld_matrix_save_json(matrix.ptr, output_path(g, matrix_out).c_str()), stage);
      if (!matrix_tsv.empty()) check(weld_matrix_save_tsv(matrix.ptr, output_path(g, matrix_tsv).c_str()), stage);
    } else if (cluster->parsed()) {
      stage = "cluster";
      if (newick_out.empty() && svg_out.empty() && dot_out.empty()) {
        std::cerr << "weld: cluster needs at least one of --newick, --svg, --dot\n";
        return kExitUsage;
      }
      Matrix matrix;
      check(weld_matrix_load_json(matrix_in.c_str(), matrix.out()), stage);
      Tree tree;
      check(weld_upgma(matrix.ptr, tree.out()), stage);
      if (!newick_out.empty()) {
        char* text = nullptr;
        check(weld_tree_newick(tree.ptr, &text), stage);
        OwnedString owned(text);
        write_text(output_path(g, newick_out), (std::string(text) + "\n").c_str(), stage);
      }
      const char* ann = annotations.empty() ? nullptr : annotations.c_str();
      for (const auto& [format, path] : {std::pair{"svg", svg_out}, std::pair{"dot", dot_out}}) {
        if (path.empty()) continue;
        char* text = nullptr;
        char* warnings = nullptr;
        check(weld_tree_render(tree.ptr, format, ann, &text, &warnings), stage);
        OwnedString owned_text(text), owned_warnings(warnings);
        print_warnings(warnings);
        write_text(output_path(g, path), text, stage);
      }
    } else if (run->parsed()) {
      stage = "run";
      if (g.config.empty()) {
        std::cerr << "weld: run requires --config\n";
        return kExitUsage;
      }
      weld_run_options options{};
      if (!g.out.empty()) options.output_dir = g.out.c_str();
      options.has_seed = g.seed_set ? 1 : 0;
      options.seed = g.seed;
      options.threads = g.threads;
      char* manifest = nullptr;
      check(weld_run(g.config.c_str(), &options, &manifest), stage);
      OwnedString owned(manifest);
      std::cout << manifest << "\n";
    }
  } catch (const StageFailure& f) {
    if (!f.stage.empty()) {
      const std::string tagged = weld_last_error_stage();
      if (tagged.empty())
        std::cerr << "weld: [" << f.stage << "] " << weld_last_error() << "\n";
      else
        std::cerr << "weld: " << weld_last_error() << "\n";
    }
    return f.status == WELD_ERR_CONFIG || f.status == WELD_ERR_INVALID_ARGUMENT ? kExitUsage : kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "weld: [" << stage << "] " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}
