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
#include <string>
#include <string_view>
#include <vector>

#include "vocabulary.hpp"

namespace weld {

enum class GenomeFormat { Fasta, Tsv };

GenomeFormat parse_genome_format(std::string_view name);

// What to do with characters outside {A,C,G,T}.
enum class InvalidBasePolicy {
  Reject,  // error naming the record
  Clean,   // uppercase acgt, split the record at any remaining invalid run
};

struct CodingRegionSet {
  std::string organism;
  std::vector<std::string> sequences;
};

// FASTA: organism = file stem. TSV rows `organism<TAB>sequence`; every row of
// one file must name the same organism.
CodingRegionSet load_coding_regions(const std::filesystem::path& path, GenomeFormat format,
                                    InvalidBasePolicy policy = InvalidBasePolicy::Reject);

constexpr int kMinNgram = 3;
constexpr int kMaxNgram = 6;

// One sentence per start offset o in [0, n): the consecutive non-overlapping
// n-grams starting at o. Trailing fragments are dropped and empty sentences
// omitted.
std::vector<TokenSeq> genome_ngram_sentences(std::string_view sequence, int n);

// Total grams over all offsets for a sequence of `length`.
std::uint64_t ngram_token_count(std::uint64_t length, int n);

}  // namespace weld
