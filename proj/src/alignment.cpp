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

#include "alignment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "error.hpp"
#include "text.hpp"

namespace weld {

TranslationModel::TranslationModel(std::string pivot_language, std::string target_language,
                                   Vocabulary pivot_vocab, Vocabulary target_vocab,
                                   std::vector<std::vector<Cell>> rows,
                                   std::vector<double> log_likelihood)
    : pivot_language_(std::move(pivot_language)),
      target_language_(std::move(target_language)),
      pivot_vocab_(std::move(pivot_vocab)),
      target_vocab_(std::move(target_vocab)),
      rows_(std::move(rows)),
      log_likelihood_(std::move(log_likelihood)) {
  if (rows_.size() != pivot_vocab_.size() + 1)
    throw Error(ErrorCode::InvalidArgument, "translation model needs one row per pivot word plus NULL");
}

double TranslationModel::prob(std::string_view pivot, std::string_view target) const {
  const auto p = pivot_vocab_.find(pivot);
  const auto t = target_vocab_.find(target);
  if (!p || !t) return 0.0;
  const auto& r = rows_[*p];
  auto it = std::lower_bound(r.begin(), r.end(), *t, [](const Cell& c, WordId id) { return c.target < id; });
  return it != r.end() && it->target == *t ? it->prob : 0.0;
}

namespace {

struct EncodedPair {
  std::vector<WordId> pivot;   // includes the NULL id
  std::vector<WordId> target;
};

std::vector<WordId> encode(const TokenSeq& s, const Vocabulary& v) {
  std::vector<WordId> ids;
  ids.reserve(s.size());
  for (const auto& token : s)
    if (auto id = v.find(token)) ids.push_back(*id);
  return ids;
}

// Offset of `target` in a row sorted by target id. The pair must exist.
std::size_t slot(const std::vector<WordId>& row_targets, std::size_t row_begin, std::size_t row_end,
                 WordId target) {
  auto first = row_targets.begin() + static_cast<std::ptrdiff_t>(row_begin);
  auto last = row_targets.begin() + static_cast<std::ptrdiff_t>(row_end);
  return static_cast<std::size_t>(std::lower_bound(first, last, target) - row_targets.begin());
}

}  // namespace

TranslationModel train_translation_model(const ParallelCorpus& corpus, std::string_view pivot,
                                         std::string_view target, std::uint32_t iterations,
                                         std::uint64_t min_count) {
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "EM iterations must be >= 1");
  const auto pivot_sentences = corpus.sentences(pivot);
  const auto target_sentences = corpus.sentences(target);
  if (corpus.verse_count() == 0)
    throw Error(ErrorCode::InvalidArgument, "no verses shared by '" + std::string(pivot) + "' and '" +
                                                std::string(target) + "'");

  Vocabulary pivot_vocab = Vocabulary::build(pivot_sentences, min_count);
  Vocabulary target_vocab = Vocabulary::build(target_sentences, min_count);
  const auto null_id = static_cast<WordId>(pivot_vocab.size());

  std::vector<EncodedPair> pairs;
  pairs.reserve(corpus.verse_count());
  for (std::size_t v = 0; v < corpus.verse_count(); ++v) {
    EncodedPair p{encode(pivot_sentences[v], pivot_vocab), encode(target_sentences[v], target_vocab)};
    if (p.target.empty()) continue;
    p.pivot.push_back(null_id);
    pairs.push_back(std::move(p));
  }
  if (pairs.empty())
    throw Error(ErrorCode::InvalidArgument, "empty verse overlap between '" + std::string(pivot) +
                                                "' and '" + std::string(target) + "'");

  // Sparse support: every (pivot, target) pair that co-occurs in some verse.
  std::vector<std::vector<WordId>> support(pivot_vocab.size() + 1);
  for (const auto& p : pairs)
    for (WordId e : p.pivot) support[e].insert(support[e].end(), p.target.begin(), p.target.end());
  std::vector<std::size_t> row_begin(support.size() + 1, 0);
  std::vector<WordId> row_targets;
  for (std::size_t e = 0; e < support.size(); ++e) {
    auto& s = support[e];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    row_begin[e] = row_targets.size();
    row_targets.insert(row_targets.end(), s.begin(), s.end());
    std::vector<WordId>().swap(s);
  }
  row_begin[support.size()] = row_targets.size();

  // Uniform start: t(f|e) = 1/|V_target| for every pair.
  std::vector<double> prob(row_targets.size(), 1.0 / static_cast<double>(target_vocab.size()));
  std::vector<double> counts(row_targets.size());
  std::vector<double> log_likelihood;
  std::vector<double> column;
  std::vector<std::size_t> slots;

  auto e_step = [&](bool accumulate) {
    double ll = 0.0;
    for (const auto& p : pairs) {
      const double norm = std::log(static_cast<double>(p.pivot.size()));
      for (WordId f : p.target) {
        column.resize(p.pivot.size());
        slots.resize(p.pivot.size());
        double denom = 0.0;
        for (std::size_t i = 0; i < p.pivot.size(); ++i) {
          const WordId e = p.pivot[i];
          slots[i] = slot(row_targets, row_begin[e], row_begin[e + 1], f);
          column[i] = prob[slots[i]];
          denom += column[i];
        }
        ll += std::log(denom) - norm;
        if (accumulate && denom > 0.0)
          for (std::size_t i = 0; i < p.pivot.size(); ++i) counts[slots[i]] += column[i] / denom;
      }
    }
    return ll;
  };

  for (std::uint32_t it = 0; it < iterations; ++it) {
    std::fill(counts.begin(), counts.end(), 0.0);
    log_likelihood.push_back(e_step(true));
    for (std::size_t e = 0; e + 1 < row_begin.size(); ++e) {
      double total = 0.0;
      for (auto k = row_begin[e]; k < row_begin[e + 1]; ++k) total += counts[k];
      if (total <= 0.0) continue;
      for (auto k = row_begin[e]; k < row_begin[e + 1]; ++k) prob[k] = counts[k] / total;
    }
  }
  log_likelihood.push_back(e_step(false));

  std::vector<std::vector<TranslationModel::Cell>> rows(support.size());
  for (std::size_t e = 0; e < rows.size(); ++e) {
    rows[e].reserve(row_begin[e + 1] - row_begin[e]);
    for (auto k = row_begin[e]; k < row_begin[e + 1]; ++k)
      if (prob[k] > 0.0) rows[e].push_back({row_targets[k], prob[k]});
  }
  return TranslationModel(std::string(pivot), std::string(target), std::move(pivot_vocab),
                          std::move(target_vocab), std::move(rows), std::move(log_likelihood));
}

std::vector<AlignmentEntry> extract_alignment(const TranslationModel& model, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "alignment threshold must be in (0, 1]");
  const auto& tv = model.target_vocab();
  std::vector<AlignmentEntry> out;
  for (std::size_t e = 0; e < model.pivot_vocab().size(); ++e) {
    const TranslationModel::Cell* best = nullptr;
    for (const auto& cell : model.row(e)) {
      if (best == nullptr || cell.prob > best->prob) {
        best = &cell;
        continue;
      }
      if (cell.prob < best->prob) continue;
      const auto cf = tv.count(cell.target), bf = tv.count(best->target);
      if (cf > bf || (cf == bf && tv.word(cell.target) < tv.word(best->target))) best = &cell;
    }
    if (best != nullptr && best->prob >= threshold)
      out.push_back({model.pivot_vocab().word(static_cast<WordId>(e)), tv.word(best->target), best->prob});
  }
  return out;
}

std::size_t AlignmentTable::entry_count() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

std::vector<std::string> AlignmentTable::languages() const {
  std::set<std::string> langs;
  for (const auto& r : rows_)
    for (const auto& [lang, _] : r) langs.insert(lang);
  return {langs.begin(), langs.end()};
}

void AlignmentTable::add(const std::string& pivot, const std::string& language, std::string target,
                         double score) {
  if (pivot.empty() || language.empty() || target.empty())
    throw Error(ErrorCode::InvalidArgument, "alignment entry with empty field");
  auto [it, inserted] = index_.emplace(pivot, pivots_.size());
  if (inserted) {
    pivots_.push_back(pivot);
    rows_.emplace_back();
  }
  auto& row = rows_[it->second];
  if (!row.emplace(language, Target{std::move(target), score}).second)
    throw Error(ErrorCode::Format, "duplicate alignment row for pivot '" + pivot + "', language '" +
                                       language + "'");
}

const AlignmentTable::Target* AlignmentTable::find(std::size_t pivot_index,
                                                   std::string_view language) const {
  const auto& row = rows_.at(pivot_index);
  auto it = row.find(language);
  return it == row.end() ? nullptr : &it->second;
}

AlignmentTable AlignmentTable::select(std::span<const std::size_t> pivot_indices) const {
  AlignmentTable out;
  for (auto i : pivot_indices)
    for (const auto& [lang, t] : rows_.at(i)) out.add(pivots_[i], lang, t.word, t.score);
  return out;
}

AlignmentTable AlignmentTable::identity(std::span<const std::string> words,
                                        std::span<const std::string> languages) {
  AlignmentTable out;
  for (const auto& w : words)
    for (const auto& lang : languages) out.add(w, lang, w, 1.0);
  return out;
}

void AlignmentTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write alignment table: " + path.string());
  for (std::size_t i = 0; i < pivots_.size(); ++i)
    for (const auto& [lang, t] : rows_[i])
      out << pivots_[i] << '\t' << lang << '\t' << t.word << '\t' << text::format_double(t.score) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

AlignmentTable AlignmentTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read alignment table: " + path.string());
  AlignmentTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
    const auto fields = text::split(line, '\t');
    if (fields.size() != 4)
      throw Error(ErrorCode::Parse, where + "expected 'pivot<TAB>language<TAB>target<TAB>score'");
    const auto score = text::parse_finite(fields[3]);
    if (!score) throw Error(ErrorCode::Parse, where + "invalid score '" + std::string(fields[3]) + "'");
    try {
      table.add(std::string(fields[0]), std::string(fields[1]), std::string(fields[2]), *score);
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
  }
  return table;
}

AlignmentTable intersect_tables(const std::map<std::string, std::vector<AlignmentEntry>>& per_language,
                                std::span<const std::string> languages, const Vocabulary& pivot_vocab) {
  if (languages.empty()) throw Error(ErrorCode::InvalidArgument, "no languages to intersect");
  std::vector<std::unordered_map<std::string_view, const AlignmentEntry*>> lookup;
  for (const auto& lang : languages) {
    auto it = per_language.find(lang);
    if (it == per_language.end())
      throw Error(ErrorCode::NotFound, "no alignment entries for language '" + lang + "'");
    auto& m = lookup.emplace_back();
    for (const auto& e : it->second) m.emplace(e.pivot, &e);
  }
  AlignmentTable table;
  for (const auto& pivot : pivot_vocab.words()) {
    const bool everywhere = std::all_of(lookup.begin(), lookup.end(),
                                        [&](const auto& m) { return m.contains(pivot); });
    if (!everywhere) continue;
    for (std::size_t l = 0; l < languages.size(); ++l) {
      const auto* e = lookup[l].at(pivot);
      table.add(pivot, languages[l], e->target, e->score);
    }
  }
  if (table.pivot_count() == 0)
    throw Error(ErrorCode::NotFound, "alignment tables have an empty intersection");
  return table;
}

}  // namespace weld
