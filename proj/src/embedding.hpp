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
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "vocabulary.hpp"

namespace weld {

using Rng = std::mt19937_64;

struct EmbeddingConfig {
  std::uint32_t dim = 100;
  std::uint32_t window = 10;
  double subsample = 1e-3;
  std::uint32_t negatives = 5;
  std::uint32_t epochs = 5;
  double initial_lr = 0.025;
  std::uint64_t min_count = 5;
  std::uint64_t seed = 1;
  // Use the full window instead of sampling its width from [1, window].
  bool fixed_window = false;
  // 1 = deterministic; >1 = lock-free shared updates (not reproducible).
  std::uint32_t threads = 1;

  static EmbeddingConfig natural() { return {}; }
  static EmbeddingConfig genome() {
    EmbeddingConfig c;
    c.window = 40;
    c.min_count = 1;
    return c;
  }

  void validate() const;
};

// Skip-gram parameters: input vectors v_w and context vectors v'_w, both
// |V| x dim, row-major.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(Vocabulary vocab, EmbeddingConfig config, std::vector<float> input,
                 std::vector<float> context);

  const Vocabulary& vocab() const noexcept { return vocab_; }
  const EmbeddingConfig& config() const noexcept { return config_; }
  std::uint32_t dim() const noexcept { return config_.dim; }

  std::span<const float> input_row(WordId id) const;
  std::span<const float> context_row(WordId id) const;
  std::span<const float> input_matrix() const noexcept { return input_; }
  std::span<const float> context_matrix() const noexcept { return context_; }

  std::span<float> input_matrix() noexcept { return input_; }
  std::span<float> context_matrix() noexcept { return context_; }

 private:
  Vocabulary vocab_;
  EmbeddingConfig config_;
  std::vector<float> input_;
  std::vector<float> context_;
};

// Probability of dropping one occurrence of a word with relative frequency
// `freq`: max(0, 1 - sqrt(t / freq)).
double subsample_discard_prob(double freq, double t);

// The Bernoulli draw the trainer uses for subsampling.
inline bool sample_discard(double discard_prob, Rng& rng) {
  return discard_prob > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < discard_prob;
}

// P_n(w) proportional to count(w)^0.75.
std::vector<double> negative_sampling_distribution(const Vocabulary& vocab);

class NoiseSampler {
 public:
  explicit NoiseSampler(const Vocabulary& vocab);
  WordId operator()(Rng& rng) { return dist_(rng); }

 private:
  std::discrete_distribution<WordId> dist_;
};

enum class PairLabel { Positive, Negative };

struct PairGradient {
  double loss = 0.0;
  std::vector<double> center;   // d loss / d v_center
  std::vector<double> context;  // d loss / d v'_context
};

// Single SGNS term: loss = -log sigma(s * v'.v), s = +1 for positive pairs
// and -1 for negative samples.
PairGradient pair_gradient(std::span<const double> center, std::span<const double> context,
                           PairLabel label);
PairGradient train_pair_gradient(const EmbeddingModel& model, WordId center, WordId context,
                                 PairLabel label);

struct EpochStats {
  std::uint32_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  std::uint64_t pairs = 0;
  double learning_rate = 0.0;
};

using EpochObserver = std::function<void(const EpochStats&, const EmbeddingModel&)>;

EmbeddingModel train(std::span<const TokenSeq> sentences, const EmbeddingConfig& config,
                     const EpochObserver& observer = {});
// Trains over a caller-supplied vocabulary; tokens outside it are skipped.
EmbeddingModel train(std::span<const TokenSeq> sentences, Vocabulary vocab,
                     const EmbeddingConfig& config, const EpochObserver& observer = {});

// (v_w + v'_w) / 2. Throws Error(NotFound) for unknown words.
std::vector<double> word_vector(const EmbeddingModel& model, std::string_view word);
std::vector<double> word_vector(const EmbeddingModel& model, WordId id);

// Throws Error(Numeric) if either vector is zero.
double cosine(std::span<const double> u, std::span<const double> v);

// Binary format: "WELDEMB1" magic, u32 version, u64 |V|, u32 dim, vocab block
// (u32 byte length, bytes, u64 count per word), input matrix, context matrix.
// Little-endian throughout, matrices as f32.
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_model(const std::filesystem::path& path);

// word2vec text format: "|V| dim" header, then "word v1 ... vd" using the
// averaged word vectors.
void export_text(const EmbeddingModel& model, const std::filesystem::path& path);

}  // namespace weld
