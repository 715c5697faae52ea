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

#include "divergence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "json.hpp"
#include "text.hpp"

namespace weld {

namespace {

const EmbeddingModel& model_for(const ModelSet& models, std::string_view language) {
  auto it = models.find(language);
  if (it == models.end() || it->second == nullptr)
    throw Error(ErrorCode::NotFound, "no embedding model for language '" + std::string(language) + "'");
  return *it->second;
}

std::string describe_missing(const std::map<std::string, std::vector<std::string>>& missing) {
  std::string out;
  for (const auto& [lang, words] : missing) {
    if (words.empty()) continue;
    out += out.empty() ? "" : "; ";
    out += lang + ": ";
    for (std::size_t i = 0; i < words.size() && i < 10; ++i) out += (i ? ", " : "") + words[i];
    if (words.size() > 10) out += ", ... (" + std::to_string(words.size()) + " total)";
  }
  return out;
}

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

}  // namespace

PivotResolution resolve_pivots(const AlignmentTable& table, const ModelSet& models,
                               std::span<const std::string> languages) {
  PivotResolution out;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < table.pivot_count(); ++i) {
    bool ok = true;
    for (const auto& lang : languages) {
      const auto* target = table.find(i, lang);
      if (target == nullptr) {
        out.missing[lang].push_back(table.pivot_words()[i] + " (no alignment)");
        ok = false;
      } else if (!model_for(models, lang).vocab().contains(target->word)) {
        out.missing[lang].push_back(target->word);
        ok = false;
      }
    }
    if (ok) keep.push_back(i);
  }
  out.table = table.select(keep);
  return out;
}

SimilarityDistribution similarity_distribution(const EmbeddingModel& model, const AlignmentTable& table,
                                               std::string_view language) {
  const auto k = table.pivot_count();
  if (k < 2)
    throw Error(ErrorCode::InvalidArgument, "similarity distribution needs at least 2 pivot words, got " +
                                                std::to_string(k));
  const std::size_t d = model.dim();
  std::vector<double> unit(k * d);
  for (std::size_t i = 0; i < k; ++i) {
    const auto* target = table.find(i, language);
    if (target == nullptr)
      throw Error(ErrorCode::NotFound, "pivot '" + table.pivot_words()[i] + "' has no entry for '" +
                                           std::string(language) + "'");
    const auto v = word_vector(model, target->word);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm == 0.0) throw Error(ErrorCode::Numeric, "zero word vector for '" + target->word + "'");
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < d; ++c) unit[i * d + c] = v[c] / norm;
  }

  SimilarityDistribution dist;
  dist.pivot_count = k;
  dist.probs.reserve(SimilarityDistribution::pair_count(k));
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double* u = &unit[i * d];
    for (std::size_t j = i + 1; j < k; ++j) {
      const double* v = &unit[j * d];
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += u[c] * v[c];
      const double raw = (std::clamp(dot, -1.0, 1.0) + 1.0) / 2.0;
      dist.probs.push_back(raw);
      total += raw;
    }
  }
  if (!(total > 0.0))
    throw Error(ErrorCode::Numeric, "similarity distribution has zero total mass");
  for (auto& x : dist.probs) x /= total;
  return dist;
}

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw Error(ErrorCode::InvalidArgument, "jsd: length mismatch (" + std::to_string(p.size()) + " vs " +
                                                std::to_string(q.size()) + ")");
  if (p.empty()) throw Error(ErrorCode::InvalidArgument, "jsd: empty distributions");
  auto normalized = [](std::span<const double> x, const char* name) {
    double sum = 0.0;
    for (double v : x) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::InvalidArgument, std::string("jsd: negative or non-finite entry in ") + name);
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw Error(ErrorCode::InvalidArgument, std::string("jsd: ") + name + " does not sum to 1");
    std::vector<double> out(x.begin(), x.end());
    for (auto& v : out) v /= sum;
    return out;
  };
  const auto pn = normalized(p, "p");
  const auto qn = normalized(q, "q");
  std::vector<double> m(pn.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = (pn[i] + qn[i]) / 2.0;
  const double value = entropy_bits(m) - (entropy_bits(pn) + entropy_bits(qn)) / 2.0;
  return std::clamp(value, 0.0, 1.0);
}

double weld_distance(const EmbeddingModel& a, const EmbeddingModel& b, const AlignmentTable& table,
                     const std::string& language_a, const std::string& language_b) {
  const ModelSet models{{language_a, &a}, {language_b, &b}};
  const std::vector<std::string> langs{language_a, language_b};
  const auto resolved = resolve_pivots(table, models, langs);
  if (resolved.table.pivot_count() < 2)
    throw Error(ErrorCode::NotFound, "fewer than 2 pivot words resolvable; missing words: " +
                                         describe_missing(resolved.missing));
  const auto pa = similarity_distribution(a, resolved.table, language_a);
  const auto pb = similarity_distribution(b, resolved.table, language_b);
  return jsd(pa.probs, pb.probs);
}

void SimilarityDistribution::save(const std::filesystem::path& path) const {
  static_assert(std::endian::native == std::endian::little, "distribution dump assumes little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write("WELDDST1", 8);
  const std::uint64_t k = pivot_count, n = probs.size();
  out.write(reinterpret_cast<const char*>(&k), sizeof k);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(probs.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

SimilarityDistribution SimilarityDistribution::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  char magic[8];
  std::uint64_t k = 0, n = 0;
  if (!in.read(magic, 8) || std::memcmp(magic, "WELDDST1", 8) != 0)
    throw Error(ErrorCode::Format, path.string() + ": bad distribution magic");
  in.read(reinterpret_cast<char*>(&k), sizeof k);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n != pair_count(k)) throw Error(ErrorCode::Format, path.string() + ": bad distribution header");
  SimilarityDistribution d;
  d.pivot_count = k;
  d.probs.resize(n);
  if (!in.read(reinterpret_cast<char*>(d.probs.data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw Error(ErrorCode::Format, path.string() + ": truncated distribution");
  return d;
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<double> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
  if (values_.size() != labels_.size() * labels_.size())
    throw Error(ErrorCode::InvalidArgument, "distance matrix must be n x n");
}

void DistanceMatrix::validate() const {
  const auto n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if (at(i, i) != 0.0)
      throw Error(ErrorCode::Format, "distance matrix diagonal must be 0 (row '" + labels_[i] + "')");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = at(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw Error(ErrorCode::Format, "distance matrix has a negative or non-finite entry at (" +
                                                    labels_[i] + ", " + labels_[j] + ")");
      if (std::abs(v - at(j, i)) > 1e-12)
        throw Error(ErrorCode::Format, "distance matrix is not symmetric at (" + labels_[i] +
                                                    ", " + labels_[j] + ")");
    }
  }
}

std::string DistanceMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t j = 0; j < size(); ++j) row.push_back(at(i, j));
    rows.push_back(std::move(row));
  }
  nlohmann::json doc{{"labels", labels_}, {"values", std::move(rows)}};
  return doc.dump(2) + "\n";
}

DistanceMatrix DistanceMatrix::from_json(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("distance matrix JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("labels") || !doc.contains("values"))
    throw Error(ErrorCode::Format, "distance matrix JSON needs 'labels' and 'values'");
  try {
    auto labels = doc.at("labels").get<std::vector<std::string>>();
    std::vector<double> values;
    for (const auto& v : doc.at("values")) {
      if (v.is_array())
        for (const auto& x : v) values.push_back(x.get<double>());
      else
        values.push_back(v.get<double>());
    }
    return DistanceMatrix(std::move(labels), std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Format, std::string("distance matrix JSON: ") + e.what());
  }
}

void DistanceMatrix::save_json(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << to_json();
}

DistanceMatrix DistanceMatrix::load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void DistanceMatrix::save_tsv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& l : labels_) out << '\t' << l;
  out << '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    out << labels_[i];
    for (std::size_t j = 0; j < size(); ++j) out << '\t' << text::format_double(at(i, j));
    out << '\n';
  }
}

DistanceMatrix distance_matrix(const ModelSet& models, const AlignmentTable& table,
                               std::span<const std::string> languages, PivotScope scope,
                               DivergenceReport* report) {
  const auto n = languages.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "distance matrix needs at least 2 languages");
  std::vector<double> values(n * n, 0.0);
  const std::vector<std::string> labels(languages.begin(), languages.end());

  if (scope == PivotScope::PerPair) {
    if (report)
      report->warnings.push_back("per-pair pivot sets: matrix entries use different coordinates and are not comparable");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = weld_distance(model_for(models, labels[i]), model_for(models, labels[j]), table,
                                       labels[i], labels[j]);
        values[i * n + j] = values[j * n + i] = v;
      }
    return DistanceMatrix(labels, std::move(values));
  }

  const auto resolved = resolve_pivots(table, models, labels);
  if (report) {
    report->pivot_count = resolved.table.pivot_count();
    report->missing = resolved.missing;
  }
  if (resolved.table.pivot_count() < 2)
    throw Error(ErrorCode::NotFound, "fewer than 2 pivot words resolvable in every model; missing words: " +
                                         describe_missing(resolved.missing));
  std::vector<SimilarityDistribution> dists;
  dists.reserve(n);
  for (const auto& lang : labels)
    dists.push_back(similarity_distribution(model_for(models, lang), resolved.table, lang));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      values[i * n + j] = values[j * n + i] = jsd(dists[i].probs, dists[j].probs);
  return DistanceMatrix(labels, std::move(values));
}

}  // namespace weld
