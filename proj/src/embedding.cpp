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

#include "embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "error.hpp"

namespace weld {

void EmbeddingConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (dim < 1) fail("embedding dim must be >= 1");
  if (window < 1) fail("window must be >= 1");
  if (!(subsample > 0.0 && subsample <= 1.0)) fail("subsample must be in (0, 1]");
  if (negatives < 1) fail("negatives must be >= 1");
  if (epochs < 1) fail("epochs must be >= 1");
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) fail("initial_lr must be > 0");
  if (min_count < 1) fail("min_count must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
}

EmbeddingModel::EmbeddingModel(Vocabulary vocab, EmbeddingConfig config, std::vector<float> input,
                               std::vector<float> context)
    : vocab_(std::move(vocab)), config_(config), input_(std::move(input)), context_(std::move(context)) {
  const auto expected = vocab_.size() * config_.dim;
  if (input_.size() != expected || context_.size() != expected)
    throw Error(ErrorCode::InvalidArgument, "embedding matrices must be |V| x dim");
}

std::span<const float> EmbeddingModel::input_row(WordId id) const {
  if (id >= vocab_.size()) throw Error(ErrorCode::NotFound, "word id out of range");
  return std::span<const float>(input_).subspan(std::size_t{id} * dim(), dim());
}

std::span<const float> EmbeddingModel::context_row(WordId id) const {
  if (id >= vocab_.size()) throw Error(ErrorCode::NotFound, "word id out of range");
  return std::span<const float>(context_).subspan(std::size_t{id} * dim(), dim());
}

double subsample_discard_prob(double freq, double t) {
  if (!(freq > 0.0 && freq <= 1.0)) throw Error(ErrorCode::InvalidArgument, "frequency must be in (0, 1]");
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "subsample threshold must be > 0");
  return std::max(0.0, 1.0 - std::sqrt(t / freq));
}

std::vector<double> negative_sampling_distribution(const Vocabulary& vocab) {
  if (vocab.empty()) throw Error(ErrorCode::InvalidArgument, "empty vocabulary");
  std::vector<double> p(vocab.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::pow(static_cast<double>(vocab.count(static_cast<WordId>(i))), 0.75);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= total;
  return p;
}

NoiseSampler::NoiseSampler(const Vocabulary& vocab) {
  const auto p = negative_sampling_distribution(vocab);
  dist_ = std::discrete_distribution<WordId>(p.begin(), p.end());
}

namespace {

// -log sigma(x), stable for large |x|.
double neg_log_sigmoid(double x) {
  return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

PairGradient pair_gradient(std::span<const double> center, std::span<const double> context,
                           PairLabel label) {
  if (center.size() != context.size()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const double sign = label == PairLabel::Positive ? 1.0 : -1.0;
  const double x = std::inner_product(center.begin(), center.end(), context.begin(), 0.0);
  // d/dx of -log sigma(s x) = -s * (1 - sigma(s x))
  const double g = -sign * (1.0 - sigmoid(sign * x));
  PairGradient out;
  out.loss = neg_log_sigmoid(sign * x);
  out.center.resize(center.size());
  out.context.resize(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    out.center[i] = g * context[i];
    out.context[i] = g * center[i];
  }
  return out;
}

PairGradient train_pair_gradient(const EmbeddingModel& model, WordId center, WordId context,
                                 PairLabel label) {
  auto in = model.input_row(center);
  auto ctx = model.context_row(context);
  std::vector<double> v(in.begin(), in.end());
  std::vector<double> w(ctx.begin(), ctx.end());
  return pair_gradient(v, w, label);
}

namespace {

// Element access policy: plain for single-threaded training, relaxed atomics
// for lock-free shared updates across workers.
template <bool Shared>
struct Cell {
  static float load(float& x) {
    if constexpr (Shared) return std::atomic_ref<float>(x).load(std::memory_order_relaxed);
    else return x;
  }
  static void store(float& x, float v) {
    if constexpr (Shared) std::atomic_ref<float>(x).store(v, std::memory_order_relaxed);
    else x = v;
  }
};

struct Corpus {
  std::vector<std::vector<WordId>> sentences;
  std::uint64_t tokens = 0;
};

struct TrainState {
  const EmbeddingConfig& config;
  const std::vector<double>& discard;
  float* input;
  float* context;
  std::uint64_t total_updates;
  std::atomic<std::uint64_t> processed{0};
};

struct WorkerResult {
  double loss = 0.0;
  std::uint64_t pairs = 0;
};

double current_lr(const TrainState& s, std::uint64_t processed) {
  const double progress = static_cast<double>(processed) / static_cast<double>(s.total_updates + 1);
  return s.config.initial_lr * std::max(1e-4, 1.0 - progress);
}

template <bool Shared>
void sgns_update(TrainState& s, WordId center, WordId target, NoiseSampler& noise, Rng& rng,
                 float lr, std::vector<float>& grad, WorkerResult& acc) {
  using C = Cell<Shared>;
  const std::size_t d = s.config.dim;
  float* v = s.input + std::size_t{center} * d;
  std::fill(grad.begin(), grad.end(), 0.0f);
  for (std::uint32_t k = 0; k <= s.config.negatives; ++k) {
    WordId sample = target;
    float label = 1.0f;
    if (k > 0) {
      sample = noise(rng);
      if (sample == target) continue;
      label = 0.0f;
    }
    float* u = s.context + std::size_t{sample} * d;
    float x = 0.0f;
    for (std::size_t i = 0; i < d; ++i) x += C::load(v[i]) * C::load(u[i]);
    const double xd = x;
    acc.loss += neg_log_sigmoid(label > 0 ? xd : -xd);
    ++acc.pairs;
    const float g = (label - static_cast<float>(sigmoid(xd))) * lr;
    for (std::size_t i = 0; i < d; ++i) grad[i] += g * C::load(u[i]);
    for (std::size_t i = 0; i < d; ++i) C::store(u[i], C::load(u[i]) + g * C::load(v[i]));
  }
  for (std::size_t i = 0; i < d; ++i) C::store(v[i], C::load(v[i]) + grad[i]);
}

template <bool Shared>
WorkerResult run_worker(TrainState& s, const Corpus& corpus, std::size_t begin, std::size_t end,
                        NoiseSampler noise, Rng& rng) {
  WorkerResult acc;
  std::vector<float> grad(s.config.dim);
  std::vector<WordId> kept;
  std::uniform_int_distribution<std::uint32_t> window(1, s.config.window);
  for (std::size_t si = begin; si < end; ++si) {
    const auto& sentence = corpus.sentences[si];
    kept.clear();
    for (WordId w : sentence)
      if (!sample_discard(s.discard[w], rng)) kept.push_back(w);
    const auto before = s.processed.fetch_add(sentence.size(), std::memory_order_relaxed);
    const auto lr = static_cast<float>(current_lr(s, before));
    const auto n = static_cast<std::ptrdiff_t>(kept.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::ptrdiff_t b = s.config.fixed_window ? s.config.window : window(rng);
      const auto lo = std::max<std::ptrdiff_t>(0, i - b);
      const auto hi = std::min<std::ptrdiff_t>(n - 1, i + b);
      for (auto j = lo; j <= hi; ++j)
        if (j != i) sgns_update<Shared>(s, kept[i], kept[j], noise, rng, lr, grad, acc);
    }
  }
  return acc;
}

Rng worker_rng(std::uint64_t seed, std::uint64_t epoch, std::uint64_t worker) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(worker)};
  return Rng(seq);
}

}  // namespace

EmbeddingModel train(std::span<const TokenSeq> sentences, const EmbeddingConfig& config,
                     const EpochObserver& observer) {
  config.validate();
  return train(sentences, Vocabulary::build(sentences, config.min_count), config, observer);
}

EmbeddingModel train(std::span<const TokenSeq> sentences, Vocabulary vocab,
                     const EmbeddingConfig& config, const EpochObserver& observer) {
  config.validate();
  if (vocab.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "training needs at least 2 vocabulary words, got " +
                                                std::to_string(vocab.size()));

  Corpus corpus;
  corpus.sentences.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<WordId> ids;
    ids.reserve(s.size());
    for (const auto& token : s)
      if (auto id = vocab.find(token)) ids.push_back(*id);
    corpus.tokens += ids.size();
    if (ids.size() > 1) corpus.sentences.push_back(std::move(ids));
  }

  std::vector<double> discard(vocab.size());
  const auto total = static_cast<double>(vocab.total_count());
  for (std::size_t i = 0; i < discard.size(); ++i)
    discard[i] = subsample_discard_prob(static_cast<double>(vocab.count(static_cast<WordId>(i))) / total,
                                        config.subsample);

  const std::size_t d = config.dim;
  std::vector<float> input(vocab.size() * d);
  std::vector<float> context(vocab.size() * d, 0.0f);
  {
    Rng init(config.seed);
    std::uniform_real_distribution<float> u(-0.5f / static_cast<float>(d), 0.5f / static_cast<float>(d));
    for (auto& x : input) x = u(init);
  }
  NoiseSampler noise(vocab);
  EmbeddingModel model(std::move(vocab), config, std::move(input), std::move(context));

  TrainState state{config, discard, model.input_matrix().data(), model.context_matrix().data(),
                   corpus.tokens * config.epochs};

  for (std::uint32_t epoch = 1; epoch <= config.epochs; ++epoch) {
    WorkerResult total_acc;
    if (config.threads == 1) {
      Rng rng = worker_rng(config.seed, epoch, 0);
      total_acc = run_worker<false>(state, corpus, 0, corpus.sentences.size(), noise, rng);
    } else {
      const std::size_t workers = std::min<std::size_t>(config.threads, std::max<std::size_t>(1, corpus.sentences.size()));
      std::vector<WorkerResult> results(workers);
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      const std::size_t chunk = (corpus.sentences.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            Rng rng = worker_rng(config.seed, epoch, w);
            const auto begin = std::min(corpus.sentences.size(), w * chunk);
            const auto end = std::min(corpus.sentences.size(), begin + chunk);
            results[w] = run_worker<true>(state, corpus, begin, end, noise, rng);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
      for (const auto& r : results) {
        total_acc.loss += r.loss;
        total_acc.pairs += r.pairs;
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.pairs = total_acc.pairs;
    stats.mean_loss = total_acc.pairs ? total_acc.loss / static_cast<double>(total_acc.pairs) : 0.0;
    stats.learning_rate = current_lr(state, state.processed.load());
    const auto finite = [](float x) { return std::isfinite(x); };
    if (!std::isfinite(stats.mean_loss) ||
        !std::all_of(model.input_matrix().begin(), model.input_matrix().end(), finite) ||
        !std::all_of(model.context_matrix().begin(), model.context_matrix().end(), finite))
      throw Error(ErrorCode::Numeric, "non-finite loss in epoch " + std::to_string(epoch) +
                                          " (learning rate too high?)");
    if (observer) observer(stats, model);
  }
  return model;
}

std::vector<double> word_vector(const EmbeddingModel& model, WordId id) {
  auto in = model.input_row(id);
  auto ctx = model.context_row(id);
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (static_cast<double>(in[i]) + static_cast<double>(ctx[i])) / 2.0;
  return out;
}

std::vector<double> word_vector(const EmbeddingModel& model, std::string_view word) {
  return word_vector(model, model.vocab().id(word));
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorCode::InvalidArgument, "cosine: dimension mismatch");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error(ErrorCode::Numeric, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

}  // namespace weld
