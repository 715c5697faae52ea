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

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alignment.hpp"
#include "embedding.hpp"

namespace weld {

// Probability vector over unordered pivot pairs (i, j), i < j, in row-major
// upper-triangle order: (0,1), (0,2), ..., (0,K-1), (1,2), ...
struct SimilarityDistribution {
  std::size_t pivot_count = 0;
  std::vector<double> probs;

  static std::size_t pair_count(std::size_t k) { return k * (k - 1) / 2; }

  // Debug dump: "WELDDST1", u64 pivot count, u64 length, f64 values (LE).
  void save(const std::filesystem::path& path) const;
  static SimilarityDistribution load(const std::filesystem::path& path);
};

using ModelSet = std::map<std::string, const EmbeddingModel*, std::less<>>;

struct PivotResolution {
  AlignmentTable table;  // pivots resolvable in every requested language
  // Target words missing from each language's model vocabulary.
  std::map<std::string, std::vector<std::string>> missing;
};

// Drops, for all languages at once, every pivot word whose target in any of
// `languages` is absent from that language's model.
PivotResolution resolve_pivots(const AlignmentTable& table, const ModelSet& models,
                               std::span<const std::string> languages);

// Shifted cosine (s + 1) / 2 of averaged word vectors, L1-normalized.
// Requires every pivot target of `language` to be in the model vocabulary.
SimilarityDistribution similarity_distribution(const EmbeddingModel& model, const AlignmentTable& table,
                                               std::string_view language);

// Jensen-Shannon divergence in bits. Inputs are renormalized; they must sum to
// 1 within 1e-6 and contain no negative entry.
double jsd(std::span<const double> p, std::span<const double> q);

double weld_distance(const EmbeddingModel& a, const EmbeddingModel& b, const AlignmentTable& table,
                     const std::string& language_a, const std::string& language_b);

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<std::string> labels, std::vector<double> values);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double at(std::size_t i, std::size_t j) const { return values_.at(i * size() + j); }

  // Symmetric within 1e-12, zero diagonal, entries finite and >= 0.
  void validate() const;

  // {"labels": [...], "values": [[row], ...]}
  std::string to_json() const;
  static DistanceMatrix from_json(std::string_view json);
  void save_json(const std::filesystem::path& path) const;
  static DistanceMatrix load_json(const std::filesystem::path& path);
  // Header row and column of labels.
  void save_tsv(const std::filesystem::path& path) const;

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

enum class PivotScope {
  Global,   // one coordinate system shared by every entry
  PerPair,  // each pair resolves its own pivots; entries are not comparable
};

struct DivergenceReport {
  std::size_t pivot_count = 0;
  std::map<std::string, std::vector<std::string>> missing;
  std::vector<std::string> warnings;
};

DistanceMatrix distance_matrix(const ModelSet& models, const AlignmentTable& table,
                               std::span<const std::string> languages,
                               PivotScope scope = PivotScope::Global,
                               DivergenceReport* report = nullptr);

}  // namespace weld
