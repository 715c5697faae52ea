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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace weld {

using WordId = std::uint32_t;
using TokenSeq = std::vector<std::string>;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

// Indexed word set with occurrence counts. Ids are dense and ordered by
// descending count, ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Takes entries in id order. Throws on duplicate or empty words.
  explicit Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> entries);

  static Vocabulary build(std::span<const TokenSeq> sentences, std::uint64_t min_count);

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  const std::string& word(WordId id) const { return words_.at(id); }
  std::uint64_t count(WordId id) const { return counts_.at(id); }
  std::uint64_t total_count() const noexcept { return total_; }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  std::optional<WordId> find(std::string_view word) const;
  // Throws Error(NotFound) for out-of-vocabulary words.
  WordId id(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> index_;
  std::uint64_t total_ = 0;
};

// Incremental counter for streaming corpora.
class VocabularyBuilder {
 public:
  void add(std::span<const std::string> sentence);
  std::uint64_t token_count() const noexcept { return tokens_; }
  Vocabulary finish(std::uint64_t min_count) const;

 private:
  std::unordered_map<std::string, std::uint64_t, StringHash, std::equal_to<>> counts_;
  std::uint64_t tokens_ = 0;
};

}  // namespace weld
