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

// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "alignment.hpp"
#include "clustering.hpp"
#include "divergence.hpp"
#include "embedding.hpp"
#include "error.hpp"
#include "genome.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "support.hpp"

using namespace weld;
namespace fs = std::filesystem;
namespace wt = weld::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1 ----

Outcome gradient_check() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    std::vector<double> v(10), w(10);
    for (auto& x : v) x = u(rng);
    for (auto& x : w) x = u(rng);
    const auto label = draw % 2 == 0 ? PairLabel::Positive : PairLabel::Negative;
    const double sign = label == PairLabel::Positive ? 1.0 : -1.0;
    const auto g = pair_gradient(v, w, label);
    const auto [nv, nw] = wt::numeric_gradient(v, w, sign, 1e-5);
    worst = std::max({worst, wt::rel_error(g.center, nv), wt::rel_error(g.context, nw)});
  }
  return {worst < 1e-4, fmt("1000 draws, d=10, max relative error %.3g (limit 1e-4)", worst)};
}

// ---------------------------------------------------------------- 2 ----

Outcome jsd_oracle() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> len(2, 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](std::size_t n) {
    std::vector<double> p(n);
    const double zeros = u(rng) < 0.3 ? 0.4 : 0.0;
    for (auto& x : p) x = u(rng) < zeros ? 0.0 : u(rng);
    if (std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; })) p[0] = 1.0;
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= s;
    return p;
  };
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = len(rng);
    const auto p = draw(n), q = draw(n);
    worst = std::max(worst, std::abs(jsd(p, q) - wt::jsd_kl_form(p, q)));
  }
  const double worked = jsd(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0});
  const double worked_err = std::abs(worked - 0.311278124459132843);
  return {worst < 1e-12 && worked_err < 1e-9,
          fmt("1000 pairs, max |diff| %.3g (limit 1e-12); JSD((.5,.5),(1,0)) = %.12f", worst, worked)};
}

// ---------------------------------------------------------------- 3 ----

// Random ultrametric: random merge order with strictly increasing heights.
DistanceMatrix random_ultrametric(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> step(0.01, 1.0);
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
  std::vector<double> d(n * n, 0.0);
  double h = 0.0;
  while (clusters.size() > 1) {
    std::shuffle(clusters.begin(), clusters.end(), rng);
    h += step(rng);
    auto a = clusters.back();
    clusters.pop_back();
    auto& b = clusters.back();
    for (auto i : a)
      for (auto j : b) d[i * n + j] = d[j * n + i] = 2.0 * h;
    b.insert(b.end(), a.begin(), a.end());
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("L" + std::to_string(i));
  return DistanceMatrix(labels, d);
}

Outcome upgma_oracle() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::uniform_int_distribution<int> small(1, 3);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = size(rng);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i)));
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<double> v(n * n, 0.0);
    // Every fifth matrix uses small integers so that ties are exercised.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = trial % 5 == 0 ? small(rng) : u(rng);
    const DistanceMatrix m(labels, v);
    const auto tree = upgma(m);
    const auto ref = wt::naive_upgma(labels, v);
    bool same = ref.size() + n == tree.nodes().size();
    for (std::size_t s = 0; same && s < ref.size(); ++s) {
      const auto leaves = tree.leaves_under(n + s);
      same = std::set<std::size_t>(leaves.begin(), leaves.end()) == ref[s].leaves &&
             std::abs(tree.node(n + s).height - ref[s].height) < 1e-12;
    }
    mismatches += same ? 0 : 1;
  }
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = random_ultrametric(rng, size(rng));
    const auto c = upgma(m).cophenetic();
    for (std::size_t i = 0; i < c.size(); ++i) worst = std::max(worst, std::abs(c[i] - m.values()[i]));
  }
  return {mismatches == 0 && worst < 1e-12,
          fmt("500 random matrices n<=8: %d merge-sequence mismatches; 500 ultrametric inputs: max cophenetic error %.3g",
              mismatches, worst)};
}

// ---------------------------------------------------------------- 4 ----

ParallelCorpus two_language(const std::vector<TokenSeq>& a, const std::vector<TokenSeq>& b) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) ids.push_back("v" + std::to_string(i));
  return ParallelCorpus({"p", "t"}, ids, {a, b});
}

Outcome em_alignment() {
  std::mt19937_64 rng(404);
  int decreasing = 0;
  double worst_drop = 0.0;
  for (int c = 0; c < 100; ++c) {
    std::uniform_int_distribution<int> vocab(3, 25), verses(5, 60), len(1, 8);
    const int vs = vocab(rng), vt = vocab(rng);
    std::uniform_int_distribution<int> ws(0, vs - 1), wt_(0, vt - 1);
    std::vector<TokenSeq> a(static_cast<std::size_t>(verses(rng))), b(a.size());
    for (std::size_t v = 0; v < a.size(); ++v) {
      for (int k = len(rng); k > 0; --k) a[v].push_back("s" + std::to_string(ws(rng)));
      for (int k = len(rng); k > 0; --k) b[v].push_back("t" + std::to_string(wt_(rng)));
    }
    const auto ll = train_translation_model(two_language(a, b), "p", "t", 15).log_likelihood();
    for (std::size_t i = 1; i < ll.size(); ++i)
      if (ll[i] < ll[i - 1]) {
        const double drop = (ll[i - 1] - ll[i]) / std::abs(ll[i - 1]);
        worst_drop = std::max(worst_drop, drop);
        // Differences at the level of double rounding are not decreases.
        if (drop > 1e-12) ++decreasing;
      }
  }

  // Uniform draws over 200 words so that every word is well attested.
  std::uniform_int_distribution<int> word(0, 199), len(5, 15);
  std::vector<TokenSeq> a(2000);
  for (auto& verse : a)
    for (int k = len(rng); k > 0; --k) verse.push_back(wt::word(static_cast<std::size_t>(word(rng))));
  const auto b = wt::rename(a, "z_");
  const auto model = train_translation_model(two_language(a, b), "p", "t", 10);
  const auto entries = extract_alignment(model, 0.5);
  std::size_t correct = 0;
  for (const auto& e : entries) correct += e.target == "z_" + e.pivot ? 1 : 0;
  const double precision = entries.empty() ? 0.0 : double(correct) / double(entries.size());
  const double recall = double(correct) / double(model.pivot_vocab().size());
  return {decreasing == 0 && precision == 1.0 && recall >= 0.95,
          fmt("100 toy corpora: %d likelihood decreases (largest relative dip %.2g); bijection 2000x%zu: "
              "precision %.4f, recall %.4f",
              decreasing, worst_drop, model.pivot_vocab().size(), precision, recall)};
}

// ---------------------------------------------------------------- 5 ----

EmbeddingConfig desk_config(std::uint64_t seed) {
  auto c = EmbeddingConfig::natural();
  c.dim = 50;
  c.seed = seed;
  c.threads = 1;
  return c;
}

AlignmentTable known_table(const Vocabulary& pivot_vocab, std::size_t k,
                           const std::vector<std::pair<std::string, std::string>>& langs) {
  AlignmentTable t;
  for (std::size_t i = 0; i < std::min(k, pivot_vocab.size()); ++i) {
    const auto& w = pivot_vocab.word(static_cast<WordId>(i));
    for (const auto& [lang, prefix] : langs) t.add(w, lang, prefix + w, 1.0);
  }
  return t;
}

std::size_t token_count(const std::vector<TokenSeq>& c) {
  std::size_t n = 0;
  for (const auto& s : c) n += s.size();
  return n;
}

Outcome self_divergence() {
  int zero = 0, separated = 0;
  double worst_ab = 0.0;
  std::size_t tokens = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const wt::TopicGenerator gen(1000, 20, 500 + seed);
    const auto a = gen.sample(5000, 5, 15, 600 + seed);
    tokens = token_count(a);
    const auto b = wt::rename(a, "b_");
    const auto c = wt::rename(wt::corrupt_verses(a, 0.5, 700 + seed), "c_");
    const auto ma = train(a, desk_config(seed));
    const auto mb = train(b, desk_config(seed));
    const auto mc = train(c, desk_config(seed));
    const auto table = known_table(ma.vocab(), 200, {{"A", ""}, {"B", "b_"}, {"C", "c_"}});
    const double ab = weld_distance(ma, mb, table, "A", "B");
    const double ac = weld_distance(ma, mc, table, "A", "C");
    worst_ab = std::max(worst_ab, ab);
    zero += ab == 0.0 ? 1 : 0;
    separated += ab < ac ? 1 : 0;
  }
  return {zero == 10 && separated >= 9,
          fmt("d=50, %zu tokens/language: D(A,B)=0 exactly in %d/10 (max %.3g); D(A,B)<D(A,C) in %d/10",
              tokens, zero, worst_ab, separated)};
}

// ---------------------------------------------------------------- 6 ----

Outcome genome_tokenizer() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<std::size_t> len(0, 60);
  std::uniform_int_distribution<int> base(0, 3);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string seq(len(rng), 'A');
    for (auto& ch : seq) ch = "ACGT"[base(rng)];
    for (int n = kMinNgram; n <= kMaxNgram; ++n) {
      const auto un = static_cast<std::size_t>(n);
      std::uint64_t closed = 0;
      for (std::size_t o = 0; o < un && o < seq.size(); ++o) closed += (seq.size() - o) / un;
      // Brute force: every window [s, s+n) is one token of offset s mod n.
      std::map<std::size_t, TokenSeq> brute;
      for (std::size_t s = 0; s + un <= seq.size(); ++s) brute[s % un].push_back(seq.substr(s, un));
      const auto sentences = genome_ngram_sentences(seq, n);
      std::uint64_t total = 0;
      for (const auto& s : sentences) total += s.size();
      bool same = sentences.size() == brute.size();
      std::size_t k = 0;
      for (const auto& [_, grams] : brute) same = same && sentences[k++] == grams;
      if (!same || total != closed || ngram_token_count(seq.size(), n) != closed) ++bad;
    }
  }
  return {bad == 0, fmt("10000 sequences x n in 3..6: %d disagreements with closed form or enumerator", bad)};
}

// ---------------------------------------------------------------- 7 ----

Outcome subsampling() {
  const std::pair<double, double> settings[] = {
      {0.5, 1e-3},   {0.2, 1e-3},  {0.1, 1e-3},  {0.05, 1e-3}, {0.01, 1e-3}, {0.005, 1e-3}, {0.002, 1e-3},
      {0.001, 1e-3}, {5e-4, 1e-3}, {0.3, 1e-4},  {0.03, 1e-4}, {0.003, 1e-4}, {3e-4, 1e-4}, {0.9, 1e-5},
      {0.09, 1e-5},  {9e-4, 1e-5}, {0.4, 0.01},  {0.05, 0.01}, {0.02, 0.01},  {0.25, 0.04}};
  constexpr int kTrials = 100000;
  int outside = 0;
  double worst_z = 0.0;
  Rng rng(707);
  for (const auto& [f, t] : settings) {
    const double expected = std::max(0.0, 1.0 - std::sqrt(t / f));
    const double p = subsample_discard_prob(f, t);
    int discarded = 0;
    for (int i = 0; i < kTrials; ++i) discarded += sample_discard(p, rng) ? 1 : 0;
    const double rate = double(discarded) / kTrials;
    const double se = std::sqrt(expected * (1.0 - expected) / kTrials);
    if (se == 0.0) {
      outside += rate == expected ? 0 : 1;
      continue;
    }
    const double z = std::abs(rate - expected) / se;
    worst_z = std::max(worst_z, z);
    outside += z <= 3.0 ? 0 : 1;
  }
  return {outside == 0, fmt("20 (f,t) settings x 1e5 trials: %d outside 3 SE (max |z| %.2f)", outside, worst_z)};
}

// ---------------------------------------------------------------- 8 ----

Outcome family_recovery() {
  int monophyletic = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::vector<std::vector<TokenSeq>> corpora;
    std::vector<std::string> langs;
    std::vector<std::pair<std::string, std::string>> prefixes;
    for (std::uint64_t f = 0; f < 3; ++f) {
      const wt::TopicGenerator family(400, 12, seed * 1000 + f);
      for (std::uint64_t l = 0; l < 3; ++l) {
        const auto lang = "f" + std::to_string(f) + "l" + std::to_string(l);
        const auto dialect = family.perturbed(0.3, seed * 1000 + 10 * f + l + 100);
        corpora.push_back(wt::rename(dialect.sample(4000, 5, 15, seed * 1000 + 10 * f + l + 500), lang + "_"));
        langs.push_back(lang);
        prefixes.emplace_back(lang, lang + "_");
      }
    }
    std::vector<EmbeddingModel> models;
    for (const auto& c : corpora) models.push_back(train(c, desk_config(seed)));
    AlignmentTable table;
    for (std::size_t i = 0; i < 200; ++i)
      for (const auto& [lang, prefix] : prefixes) table.add(wt::word(i), lang, prefix + wt::word(i), 1.0);
    ModelSet set;
    for (std::size_t i = 0; i < langs.size(); ++i) set[langs[i]] = &models[i];
    const auto matrix = distance_matrix(set, table, langs);
    const auto tree = upgma(matrix);
    std::set<std::set<std::size_t>> clades;
    for (std::size_t i = tree.leaf_count(); i < tree.nodes().size(); ++i) {
      const auto leaves = tree.leaves_under(i);
      clades.insert(std::set<std::size_t>(leaves.begin(), leaves.end()));
    }
    bool ok = true;
    for (std::size_t f = 0; f < 3; ++f) ok = ok && clades.contains({3 * f, 3 * f + 1, 3 * f + 2});
    monophyletic += ok ? 1 : 0;
  }
  return {monophyletic >= 8,
          fmt("3 families x 3 languages: all families monophyletic in %d/10 runs", monophyletic)};
}

// ---------------------------------------------------------------- 9 ----

Outcome full_scale_harness() {
  const fs::path fixtures = WELD_FIXTURE_DIR;
  wt::TempDir out("weld-acceptance");
  std::vector<std::string> notes;
  bool ok = true;

  auto natural = RunConfig::load(fixtures / "natural.json");
  natural.output_dir = out / "natural";
  const auto nm = run(natural);
  const auto nmatrix = DistanceMatrix::load_json(out / "natural" / "matrix.json");
  const bool natural_ok = nm.count("model") == 3 && nm.count("tree") == 1 && nmatrix.size() == 3 &&
                          RunManifest::load(out / "natural" / "manifest.json").verify(out / "natural").empty();
  ok = ok && natural_ok;
  notes.push_back(fmt("bible-XML natural run %s", natural_ok ? "ok" : "FAILED"));

  auto genome = RunConfig::load(fixtures / "genome.json");
  genome.output_dir = out / "genome";
  const auto gm = run(genome);
  bool genome_ok = gm.count("heatmap") == 4 && gm.count("tree") == 4 &&
                   RunManifest::load(out / "genome" / "manifest.json").verify(out / "genome").empty();
  for (const auto& src : genome.genomes) {
    const auto set = load_coding_regions(src.path, src.format);
    std::uint64_t grams = 0;
    for (const auto& s : set.sequences) grams += ngram_token_count(s.size(), 3);
    genome_ok = genome_ok && set.sequences.size() == 24 && grams == 6623;
  }
  ok = ok && genome_ok;
  notes.push_back(fmt("FASTA genome run n=3..6 %s", genome_ok ? "ok" : "FAILED"));

  if (const char* path = std::getenv("WELD_ARABIDOPSIS"); path != nullptr && *path != '\0') {
    const char* format = std::getenv("WELD_ARABIDOPSIS_FORMAT");
    const auto set = load_coding_regions(path, parse_genome_format(format ? format : "fasta"));
    std::uint64_t grams = 0;
    for (const auto& s : set.sequences) grams += ngram_token_count(s.size(), 3);
    const bool match = set.sequences.size() == 179824 && grams == 42618288;
    ok = ok && match;
    notes.push_back(fmt("Arabidopsis: %zu CRs (179824), %llu 3-grams (42618288) %s", set.sequences.size(),
                        static_cast<unsigned long long>(grams), match ? "match" : "MISMATCH"));
  } else {
    notes.push_back("Table 1 counts not checked: set WELD_ARABIDOPSIS to the extract");
  }
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    double limit_seconds;  // 0 = no runtime bound
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {1, 10, gradient_check}, {2, 5, jsd_oracle},         {3, 30, upgma_oracle},
      {4, 60, em_alignment},   {5, 300, self_divergence},  {6, 10, genome_tokenizer},
      {7, 0, subsampling},     {8, 900, family_recovery},  {9, 0, full_scale_harness},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::string timing = fmt("%.1fs", secs);
    if (c.limit_seconds > 0) timing += fmt(" of %.0fs", c.limit_seconds);
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << o.detail << "  [" << timing
              << "]" << std::endl;
  }
  return failed;
}
