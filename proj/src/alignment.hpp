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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "vocabulary.hpp"

namespace weld {

struct AlignConfig {
  std::uint32_t iterations = 10;
  double threshold = 0.5;
  // Words rarer than this are invisible to the translation model.
  std::uint64_t min_count = 1;
};

// Lexical translation table p(target word | pivot word) trained with
// Model-1 style EM. Row `pivot_vocab().size()` is the NULL pivot, which
// absorbs target words without a lexical counterpart.
class TranslationModel {
 public:
  struct Cell {
    WordId target;
    double prob;
  };

  TranslationModel(std::string pivot_language, std::string target_language, Vocabulary pivot_vocab,
                   Vocabulary target_vocab, std::vector<std::vector<Cell>> rows,
                   std::vector<double> log_likelihood);

  const std::string& pivot_language() const noexcept { return pivot_language_; }
  const std::string& target_language() const noexcept { return target_language_; }
  const Vocabulary& pivot_vocab() const noexcept { return pivot_vocab_; }
  const Vocabulary& target_vocab() const noexcept { return target_vocab_; }

  // Cells sorted by target id. `row(pivot_vocab().size())` is the NULL row.
  std::span<const Cell> row(std::size_t pivot) const { return rows_.at(pivot); }
  std::size_t null_row() const noexcept { return pivot_vocab_.size(); }

  double prob(std::string_view pivot, std::string_view target) const;

  // Corpus log-likelihood before the first update and after every iteration.
  const std::vector<double>& log_likelihood() const noexcept { return log_likelihood_; }

 private:
  std::string pivot_language_;
  std::string target_language_;
  Vocabulary pivot_vocab_;
  Vocabulary target_vocab_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<double> log_likelihood_;
};

TranslationModel train_translation_model(const ParallelCorpus& corpus, std::string_view pivot,
                                         std::string_view target, std::uint32_t iterations,
                                         std::uint64_t min_count = 1);

struct AlignmentEntry {
  std::string pivot;
  std::string target;
  double score = 0.0;

  friend bool operator==(const AlignmentEntry&, const AlignmentEntry&) = default;
};

// Best target per pivot word, kept when its probability reaches `threshold`.
// Ties go to the more frequent target word, then the lexicographically smaller.
std::vector<AlignmentEntry> extract_alignment(const TranslationModel& model, double threshold);

// Pivot word -> one (target word, score) per language. Distinct pivot words
// may share a target word.
class AlignmentTable {
 public:
  struct Target {
    std::string word;
    double score = 0.0;
    friend bool operator==(const Target&, const Target&) = default;
  };

  const std::vector<std::string>& pivot_words() const noexcept { return pivots_; }
  std::size_t pivot_count() const noexcept { return pivots_.size(); }
  std::size_t entry_count() const noexcept;
  // Every language named by at least one entry, sorted.
  std::vector<std::string> languages() const;

  // Appends a pivot word if new. Throws on a duplicate (pivot, language).
  void add(const std::string& pivot, const std::string& language, std::string target, double score);

  const Target* find(std::size_t pivot_index, std::string_view language) const;
  const std::map<std::string, Target, std::less<>>& entries(std::size_t pivot_index) const {
    return rows_.at(pivot_index);
  }

  // New table with only the given pivot rows, in the given order.
  AlignmentTable select(std::span<const std::size_t> pivot_indices) const;

  // Each word maps to itself with score 1 in every language.
  static AlignmentTable identity(std::span<const std::string> words,
                                 std::span<const std::string> languages);

  // TSV rows `pivot<TAB>language<TAB>target<TAB>score`, sorted by pivot
  // order then language.
  void save(const std::filesystem::path& path) const;
  static AlignmentTable load(const std::filesystem::path& path);

  friend bool operator==(const AlignmentTable& a, const AlignmentTable& b) {
    return a.pivots_ == b.pivots_ && a.rows_ == b.rows_;
  }

 private:
  std::vector<std::string> pivots_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
  std::vector<std::map<std::string, Target, std::less<>>> rows_;
};

// Keeps pivot words with an entry for every language, ordered by the pivot
// vocabulary (descending pivot-corpus frequency).
AlignmentTable intersect_tables(const std::map<std::string, std::vector<AlignmentEntry>>& per_language,
                                std::span<const std::string> languages, const Vocabulary& pivot_vocab);

}  // namespace weld
