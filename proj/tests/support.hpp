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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vocabulary.hpp"

namespace weld::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "weld") {
    std::random_device rd;
    path_ = fs::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string word(std::size_t i) { return "w" + std::to_string(i); }

// Order-preserving renaming: ids and counts of the renamed corpus match the
// original one for one.
inline std::vector<TokenSeq> rename(const std::vector<TokenSeq>& corpus, const std::string& prefix) {
  std::vector<TokenSeq> out = corpus;
  for (auto& s : out)
    for (auto& t : s) t = prefix + t;
  return out;
}

// Topic-mixture generator over a fixed word list. Every verse picks a topic
// and draws its words from that topic's skewed distribution.
struct TopicGenerator {
  std::size_t vocab = 200;
  std::size_t topics = 10;
  std::vector<std::vector<double>> weights;  // topics x vocab

  TopicGenerator(std::size_t vocab_size, std::size_t topic_count, std::uint64_t seed)
      : vocab(vocab_size), topics(topic_count), weights(topic_count, std::vector<double>(vocab_size)) {
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> g(0.15, 1.0);
    for (auto& row : weights)
      for (std::size_t w = 0; w < vocab; ++w) row[w] = g(rng) + 1e-3 / static_cast<double>(w + 1);
  }

  // Same topics, each weight scaled by a log-normal factor.
  TopicGenerator perturbed(double sigma, std::uint64_t seed) const {
    TopicGenerator out = *this;
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> f(0.0, sigma);
    for (auto& row : out.weights)
      for (auto& x : row) x *= f(rng);
    return out;
  }

  std::vector<TokenSeq> sample(std::size_t verses, std::size_t min_len, std::size_t max_len,
                               std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::vector<std::discrete_distribution<std::size_t>> dists;
    for (const auto& row : weights) dists.emplace_back(row.begin(), row.end());
    std::uniform_int_distribution<std::size_t> topic(0, topics - 1);
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::vector<TokenSeq> out(verses);
    for (auto& verse : out) {
      auto& d = dists[topic(rng)];
      verse.resize(len(rng));
      for (auto& t : verse) t = word(d(rng));
    }
    return out;
  }
};

// Pools the tokens of a random `fraction` of verses and deals them back out
// in random order. Unigram counts (and so vocabulary ids) are unchanged; the
// co-occurrence structure of the chosen verses is destroyed.
inline std::vector<TokenSeq> corrupt_verses(const std::vector<TokenSeq>& corpus, double fraction,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(corpus.size()))));
  std::vector<std::string> pool;
  for (auto i : idx) pool.insert(pool.end(), corpus[i].begin(), corpus[i].end());
  std::shuffle(pool.begin(), pool.end(), rng);
  auto out = corpus;
  std::size_t next = 0;
  for (auto i : idx)
    for (auto& t : out[i]) t = pool[next++];
  return out;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = (static_cast<double>(i + j) / 2.0) + 1.0;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace weld::testing
