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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alignment.hpp"
#include "corpus.hpp"
#include "divergence.hpp"
#include "embedding.hpp"
#include "genome.hpp"

namespace weld {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Workflow { Natural, Genome };

struct GenomeSource {
  std::string organism;
  std::filesystem::path path;
  GenomeFormat format = GenomeFormat::Fasta;
};

// One declarative document drives a run. Relative paths are resolved against
// the directory holding the config file.
struct RunConfig {
  Workflow workflow = Workflow::Natural;

  // natural
  std::filesystem::path corpus_dir;
  CorpusFormat corpus_format = CorpusFormat::Tsv;
  std::string pivot;
  std::vector<std::string> languages;  // empty = every language in the corpus
  TokenizeOptions tokenize;
  AlignConfig alignment;
  PivotScope pivot_scope = PivotScope::Global;

  // genome
  std::vector<GenomeSource> genomes;
  std::vector<int> ngrams{3, 4, 5, 6};
  InvalidBasePolicy base_policy = InvalidBasePolicy::Reject;

  EmbeddingConfig embedding;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> annotations;
  std::uint64_t seed = 1;
  std::uint32_t threads = 1;

  // Throws Error(Config) on unknown keys, bad types or invalid values.
  static RunConfig from_json(std::string_view json, const std::filesystem::path& base_dir = {});
  // Reads the file, then applies the WELD_OUT_DIR override if set.
  static RunConfig load(const std::filesystem::path& path);

  std::string to_json() const;
  void validate() const;
};

struct ArtifactRecord {
  std::string kind;  // vocab, model, table, matrix, heatmap, tree, render, distribution
  std::string name;
  std::string path;  // relative to the output directory
  std::string sha256;
  // Set for artifacts served through the content-addressed cache.
  std::optional<bool> cache_hit;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string workflow;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<ArtifactRecord> artifacts;
  std::map<std::string, double> timings;  // seconds per stage
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::vector<std::string> warnings;

  std::size_t count(std::string_view kind) const;
  std::string to_json() const;
  static RunManifest from_json(std::string_view json);
  void save(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);

  // Problems found re-hashing every artifact under `output_dir`; empty when
  // all artifacts exist and match.
  std::vector<std::string> verify(const std::filesystem::path& output_dir) const;
};

RunManifest run_natural(const RunConfig& config);
RunManifest run_genome(const RunConfig& config);
RunManifest run(const RunConfig& config);

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first
// failure.
void parallel_for(std::size_t n, std::uint32_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace weld
