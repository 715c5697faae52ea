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

#include "corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "error.hpp"
#include "unicode.hpp"

namespace weld {

namespace fs = std::filesystem;

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "tsv") return CorpusFormat::Tsv;
  if (name == "bible-xml" || name == "xml") return CorpusFormat::BibleXml;
  throw Error(ErrorCode::InvalidArgument, "unknown corpus format '" + std::string(name) + "'");
}

TokenSeq tokenize_natural(std::string_view text, const TokenizeOptions& options) {
  TokenSeq tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  unicode::for_each_code_point(text, [&](char32_t cp) {
    if (unicode::is_space(cp)) {
      flush();
    } else if (unicode::is_punctuation(cp)) {
      if (options.punctuation == PunctuationMode::Split) flush();
    } else {
      unicode::append_utf8(current, options.lowercase ? unicode::to_lower(cp) : cp);
    }
  });
  flush();
  return tokens;
}

ParallelCorpus::ParallelCorpus(std::vector<std::string> languages,
                               std::vector<std::string> verse_ids,
                               std::vector<std::vector<TokenSeq>> tokens)
    : languages_(std::move(languages)), verse_ids_(std::move(verse_ids)), tokens_(std::move(tokens)) {
  if (tokens_.size() != languages_.size())
    throw Error(ErrorCode::InvalidArgument, "corpus: one token table per language required");
  for (std::size_t l = 0; l < languages_.size(); ++l) {
    if (tokens_[l].size() != verse_ids_.size())
      throw Error(ErrorCode::InvalidArgument,
                  "corpus: language '" + languages_[l] + "' does not cover every verse");
    for (std::size_t j = 0; j < l; ++j)
      if (languages_[j] == languages_[l])
        throw Error(ErrorCode::InvalidArgument, "corpus: duplicate language '" + languages_[l] + "'");
  }
}

bool ParallelCorpus::has_language(std::string_view language) const {
  return std::find(languages_.begin(), languages_.end(), language) != languages_.end();
}

std::size_t ParallelCorpus::language_index(std::string_view language) const {
  auto it = std::find(languages_.begin(), languages_.end(), language);
  if (it == languages_.end())
    throw Error(ErrorCode::NotFound, "language not in corpus: '" + std::string(language) + "'");
  return static_cast<std::size_t>(it - languages_.begin());
}

std::span<const TokenSeq> ParallelCorpus::sentences(std::string_view language) const {
  return tokens_[language_index(language)];
}

namespace {

struct RawVerse {
  std::string id;
  std::string text;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<RawVerse> parse_tsv(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<RawVerse> verses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) +
                                        ": expected 'verse_id<TAB>text'");
    verses.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return verses;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos) {
      out += s[i];
      continue;
    }
    const auto name = s.substr(i + 1, semi - i - 1);
    if (name == "amp") out += '&';
    else if (name == "lt") out += '<';
    else if (name == "gt") out += '>';
    else if (name == "quot") out += '"';
    else if (name == "apos") out += '\'';
    else if (name.size() > 1 && name[0] == '#') {
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const std::string digits(name.substr(hex ? 2 : 1));
      char32_t cp = 0;
      try {
        cp = static_cast<char32_t>(std::stoul(digits, nullptr, hex ? 16 : 10));
      } catch (const std::exception&) {
        out.append(s.substr(i, semi - i + 1));
        i = semi;
        continue;
      }
      unicode::append_utf8(out, cp);
    } else {
      out.append(s.substr(i, semi - i + 1));
    }
    i = semi;
  }
  return out;
}

// Reads <seg id="..."> elements of the multilingual bible XML (CES) layout.
std::vector<RawVerse> parse_bible_xml(const fs::path& path) {
  const std::string doc = read_file(path);
  std::vector<RawVerse> verses;
  std::size_t pos = 0;
  while ((pos = doc.find("<seg", pos)) != std::string::npos) {
    const auto tag_end = doc.find('>', pos);
    if (tag_end == std::string::npos)
      throw Error(ErrorCode::Parse, path.string() + ": unterminated <seg> tag");
    const std::string_view tag(doc.data() + pos, tag_end - pos);
    const auto id_at = tag.find("id=");
    if (id_at == std::string_view::npos || id_at + 3 >= tag.size())
      throw Error(ErrorCode::Parse, path.string() + ": <seg> without id attribute");
    const char quote = tag[id_at + 3];
    const auto id_end = tag.find(quote, id_at + 4);
    if ((quote != '"' && quote != '\'') || id_end == std::string_view::npos)
      throw Error(ErrorCode::Parse, path.string() + ": malformed <seg> id attribute");
    std::string id(tag.substr(id_at + 4, id_end - id_at - 4));
    if (tag.ends_with("/")) {
      verses.push_back({std::move(id), {}});
      pos = tag_end + 1;
      continue;
    }
    const auto close = doc.find("</seg>", tag_end);
    if (close == std::string::npos)
      throw Error(ErrorCode::Parse, path.string() + ": missing </seg> for verse " + id);
    verses.push_back({std::move(id), decode_entities(std::string_view(doc).substr(tag_end + 1, close - tag_end - 1))});
    pos = close + 6;
  }
  return verses;
}

}  // namespace

CorpusLoadResult load_verse_aligned(const fs::path& directory, CorpusFormat format,
                                    const TokenizeOptions& options) {
  if (!fs::is_directory(directory))
    throw Error(ErrorCode::Io, "corpus directory not found: " + directory.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.empty() || name[0] == '.') continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.stem() < b.stem(); });
  if (files.empty()) throw Error(ErrorCode::Io, "no language files in " + directory.string());

  std::vector<std::string> languages;
  std::vector<std::unordered_map<std::string, TokenSeq>> per_language;
  std::vector<std::string> first_order;
  std::vector<std::size_t> raw_counts;
  for (const auto& file : files) {
    auto raw = format == CorpusFormat::Tsv ? parse_tsv(file) : parse_bible_xml(file);
    std::unordered_map<std::string, TokenSeq> verses;
    verses.reserve(raw.size());
    for (auto& v : raw) {
      if (verses.contains(v.id))
        throw Error(ErrorCode::Parse, file.string() + ": duplicate verse id '" + v.id + "'");
      if (languages.empty()) first_order.push_back(v.id);
      verses.emplace(std::move(v.id), tokenize_natural(v.text, options));
    }
    languages.push_back(file.stem().string());
    raw_counts.push_back(verses.size());
    per_language.push_back(std::move(verses));
  }

  std::vector<std::string> kept;
  for (const auto& id : first_order) {
    bool everywhere = true;
    for (const auto& verses : per_language) {
      auto it = verses.find(id);
      if (it == verses.end() || it->second.empty()) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) kept.push_back(id);
  }

  CorpusLoadResult result;
  for (std::size_t l = 0; l < languages.size(); ++l) {
    result.dropped[languages[l]] = raw_counts[l] - kept.size();
    if (kept.empty())
      throw Error(ErrorCode::Format, "language '" + languages[l] + "' has zero surviving verses");
  }

  std::vector<std::vector<TokenSeq>> tokens(languages.size());
  for (std::size_t l = 0; l < languages.size(); ++l) {
    tokens[l].reserve(kept.size());
    for (const auto& id : kept) tokens[l].push_back(std::move(per_language[l].at(id)));
  }
  result.corpus = ParallelCorpus(std::move(languages), std::move(kept), std::move(tokens));
  return result;
}

}  // namespace weld
