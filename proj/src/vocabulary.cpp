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

#include "vocabulary.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "error.hpp"

namespace weld {

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> entries) {
  words_.reserve(entries.size());
  counts_.reserve(entries.size());
  index_.reserve(entries.size());
  for (auto& [word, count] : entries) {
    if (word.empty()) throw Error(ErrorCode::InvalidArgument, "vocabulary: empty word");
    const auto id = static_cast<WordId>(words_.size());
    if (!index_.emplace(word, id).second)
      throw Error(ErrorCode::InvalidArgument, "vocabulary: duplicate word '" + word + "'");
    words_.push_back(std::move(word));
    counts_.push_back(count);
    total_ += count;
  }
}

Vocabulary Vocabulary::build(std::span<const TokenSeq> sentences, std::uint64_t min_count) {
  VocabularyBuilder builder;
  for (const auto& s : sentences) builder.add(s);
  return builder.finish(min_count);
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WordId Vocabulary::id(std::string_view word) const {
  if (auto id = find(word)) return *id;
  throw Error(ErrorCode::NotFound, "word not in vocabulary: '" + std::string(word) + "'");
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write vocabulary: " + path.string());
  for (std::size_t i = 0; i < words_.size(); ++i)
    out << words_[i] << '\t' << counts_[i] << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read vocabulary: " + path.string());
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    std::uint64_t count = 0;
    const char* first = tab == std::string::npos ? nullptr : line.data() + tab + 1;
    const char* last = line.data() + line.size();
    if (first == nullptr || std::from_chars(first, last, count).ptr != last)
      throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) +
                                        ": expected 'word<TAB>count'");
    entries.emplace_back(line.substr(0, tab), count);
  }
  return Vocabulary(std::move(entries));
}

void VocabularyBuilder::add(std::span<const std::string> sentence) {
  for (const auto& token : sentence) {
    auto it = counts_.find(token);
    if (it == counts_.end())
      counts_.emplace(token, 1);
    else
      ++it->second;
  }
  tokens_ += sentence.size();
}

Vocabulary VocabularyBuilder::finish(std::uint64_t min_count) const {
  if (min_count < 1) throw Error(ErrorCode::InvalidArgument, "min_count must be >= 1");
  if (tokens_ == 0) throw Error(ErrorCode::InvalidArgument, "cannot build vocabulary from an empty stream");
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  for (const auto& [word, count] : counts_)
    if (count >= min_count) entries.emplace_back(word, count);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return Vocabulary(std::move(entries));
}

}  // namespace weld
