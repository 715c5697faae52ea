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

#include "genome.hpp"

#include <fstream>

#include "error.hpp"

namespace weld {

namespace {

bool is_base(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; }

char upper_base(char c) {
  switch (c) {
    case 'a': return 'A';
    case 'c': return 'C';
    case 'g': return 'G';
    case 't': return 'T';
    default: return c;
  }
}

void check_n(int n) {
  if (n < kMinNgram || n > kMaxNgram)
    throw Error(ErrorCode::InvalidArgument,
                "n-gram length must be in [3, 6], got " + std::to_string(n));
}

class RecordSink {
 public:
  RecordSink(std::string path, InvalidBasePolicy policy, CodingRegionSet& out)
      : path_(std::move(path)), policy_(policy), out_(out) {}

  void add(std::size_t record, const std::string& raw) {
    if (raw.empty())
      throw Error(ErrorCode::Parse, path_ + ": record " + std::to_string(record) + " has no sequence");
    if (policy_ == InvalidBasePolicy::Reject) {
      for (std::size_t i = 0; i < raw.size(); ++i)
        if (!is_base(raw[i]))
          throw Error(ErrorCode::Format, path_ + ": record " + std::to_string(record) +
                                             ": invalid base '" + std::string(1, raw[i]) +
                                             "' at position " + std::to_string(i));
      out_.sequences.push_back(raw);
      return;
    }
    std::string piece;
    for (char c : raw) {
      c = upper_base(c);
      if (is_base(c)) {
        piece += c;
      } else if (!piece.empty()) {
        out_.sequences.push_back(std::move(piece));
        piece.clear();
      }
    }
    if (!piece.empty()) out_.sequences.push_back(std::move(piece));
  }

 private:
  std::string path_;
  InvalidBasePolicy policy_;
  CodingRegionSet& out_;
};

}  // namespace

GenomeFormat parse_genome_format(std::string_view name) {
  if (name == "fasta" || name == "fa") return GenomeFormat::Fasta;
  if (name == "tsv") return GenomeFormat::Tsv;
  throw Error(ErrorCode::InvalidArgument, "unknown genome format '" + std::string(name) + "'");
}

CodingRegionSet load_coding_regions(const std::filesystem::path& path, GenomeFormat format,
                                    InvalidBasePolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());

  CodingRegionSet set;
  RecordSink sink(path.string(), policy, set);
  std::string line;
  std::size_t record = 0;

  if (format == GenomeFormat::Fasta) {
    set.organism = path.stem().string();
    std::string seq;
    bool open = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line[0] == '>') {
        if (open) sink.add(record, seq);
        ++record;
        seq.clear();
        open = true;
        continue;
      }
      if (!open)
        throw Error(ErrorCode::Parse, path.string() + ": record 1: sequence data before first header");
      for (char c : line)
        if (c != ' ' && c != '\t') seq += c;
    }
    if (open) sink.add(record, seq);
  } else {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      ++record;
      const auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0)
        throw Error(ErrorCode::Parse, path.string() + ": record " + std::to_string(record) +
                                          ": expected 'organism<TAB>sequence'");
      auto organism = line.substr(0, tab);
      if (set.organism.empty())
        set.organism = organism;
      else if (organism != set.organism)
        throw Error(ErrorCode::Parse, path.string() + ": record " + std::to_string(record) +
                                          ": organism '" + organism + "' differs from '" +
                                          set.organism + "'");
      sink.add(record, line.substr(tab + 1));
    }
  }
  if (record == 0) throw Error(ErrorCode::Format, path.string() + ": no records");
  return set;
}

std::vector<TokenSeq> genome_ngram_sentences(std::string_view sequence, int n) {
  check_n(n);
  for (std::size_t i = 0; i < sequence.size(); ++i)
    if (!is_base(sequence[i]))
      throw Error(ErrorCode::Format, "invalid base '" + std::string(1, sequence[i]) +
                                         "' at position " + std::to_string(i));
  const auto width = static_cast<std::size_t>(n);
  std::vector<TokenSeq> sentences;
  for (std::size_t offset = 0; offset < width; ++offset) {
    if (sequence.size() < offset + width) continue;
    TokenSeq sentence;
    sentence.reserve((sequence.size() - offset) / width);
    for (std::size_t at = offset; at + width <= sequence.size(); at += width)
      sentence.emplace_back(sequence.substr(at, width));
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

std::uint64_t ngram_token_count(std::uint64_t length, int n) {
  check_n(n);
  const auto width = static_cast<std::uint64_t>(n);
  std::uint64_t total = 0;
  for (std::uint64_t offset = 0; offset < width && offset < length; ++offset)
    total += (length - offset) / width;
  return total;
}

}  // namespace weld
