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

#include "vocabulary.hpp"

namespace weld {

enum class CorpusFormat { Tsv, BibleXml };

CorpusFormat parse_corpus_format(std::string_view name);

enum class PunctuationMode {
  Delete,  // "a--b" -> "ab"
  Split,   // "a--b" -> "a", "b"
};

struct TokenizeOptions {
  PunctuationMode punctuation = PunctuationMode::Delete;
  bool lowercase = true;
};

// Whitespace split, Unicode punctuation (general category P*) removed,
// lowercased where the script has case. Never yields empty tokens.
TokenSeq tokenize_natural(std::string_view text, const TokenizeOptions& options = {});

// Verse-aligned corpus: every language holds a token sequence for every verse.
class ParallelCorpus {
 public:
  ParallelCorpus() = default;
  // tokens[l][v] is the token sequence of verse v in language l.
  ParallelCorpus(std::vector<std::string> languages, std::vector<std::string> verse_ids,
                 std::vector<std::vector<TokenSeq>> tokens);

  const std::vector<std::string>& languages() const noexcept { return languages_; }
  const std::vector<std::string>& verse_ids() const noexcept { return verse_ids_; }
  std::size_t verse_count() const noexcept { return verse_ids_.size(); }

  bool has_language(std::string_view language) const;
  std::size_t language_index(std::string_view language) const;
  std::span<const TokenSeq> sentences(std::string_view language) const;

 private:
  std::vector<std::string> languages_;
  std::vector<std::string> verse_ids_;
  std::vector<std::vector<TokenSeq>> tokens_;
};

struct CorpusLoadResult {
  ParallelCorpus corpus;
  // Verses present in a language file but absent (or empty) in another.
  std::map<std::string, std::size_t> dropped;
};

// Loads one file per language from `directory`; the language id is the file
// stem. The result keeps only verse ids present (and non-empty after
// tokenization) in every language, in the order of the first language file.
CorpusLoadResult load_verse_aligned(const std::filesystem::path& directory, CorpusFormat format,
                                    const TokenizeOptions& options = {});

}  // namespace weld
