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

#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "clustering.hpp"
#include "error.hpp"
#include "hashing.hpp"
#include "json.hpp"

namespace weld {

namespace fs = std::filesystem;
using nlohmann::json;

void parallel_for(std::size_t n, std::uint32_t threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max<std::uint32_t>(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------- config --

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, "config: " + what); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      config_error("unknown key '" + key + "' in " + where);
}

template <typename T>
T read(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("bad value for '") + key + "'");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

const char* workflow_name(Workflow w) { return w == Workflow::Natural ? "natural" : "genome"; }

json embedding_json(const EmbeddingConfig& e) {
  return {{"dim", e.dim},           {"window", e.window},       {"subsample", e.subsample},
          {"negatives", e.negatives}, {"epochs", e.epochs},       {"initial_lr", e.initial_lr},
          {"min_count", e.min_count}, {"fixed_window", e.fixed_window}, {"seed", e.seed},
          {"threads", e.threads}};
}

}  // namespace

RunConfig RunConfig::from_json(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  check_keys(doc,
             {"workflow", "corpus", "pivot", "languages", "tokenize", "alignment", "pivot_scope",
              "organisms", "ngrams", "invalid_bases", "embedding", "output", "annotations", "seed",
              "threads"},
             "config");

  RunConfig c;
  const auto workflow = read<std::string>(doc, "workflow", "natural");
  if (workflow == "natural") c.workflow = Workflow::Natural;
  else if (workflow == "genome") c.workflow = Workflow::Genome;
  else config_error("workflow must be 'natural' or 'genome'");
  c.embedding = c.workflow == Workflow::Natural ? EmbeddingConfig::natural() : EmbeddingConfig::genome();

  try {
    if (doc.contains("corpus")) {
      const auto& corpus = doc["corpus"];
      check_keys(corpus, {"path", "format"}, "corpus");
      c.corpus_dir = resolve(base_dir, read<std::string>(corpus, "path", ""));
      c.corpus_format = parse_corpus_format(read<std::string>(corpus, "format", "tsv"));
    }
    c.pivot = read<std::string>(doc, "pivot", "");
    c.languages = read<std::vector<std::string>>(doc, "languages", {});
    if (doc.contains("tokenize")) {
      const auto& t = doc["tokenize"];
      check_keys(t, {"punctuation", "lowercase"}, "tokenize");
      const auto mode = read<std::string>(t, "punctuation", "delete");
      if (mode == "delete") c.tokenize.punctuation = PunctuationMode::Delete;
      else if (mode == "split") c.tokenize.punctuation = PunctuationMode::Split;
      else config_error("tokenize.punctuation must be 'delete' or 'split'");
      c.tokenize.lowercase = read<bool>(t, "lowercase", true);
    }
    if (doc.contains("alignment")) {
      const auto& a = doc["alignment"];
      check_keys(a, {"threshold", "iterations", "min_count"}, "alignment");
      c.alignment.threshold = read<double>(a, "threshold", c.alignment.threshold);
      c.alignment.iterations = read<std::uint32_t>(a, "iterations", c.alignment.iterations);
      c.alignment.min_count = read<std::uint64_t>(a, "min_count", c.alignment.min_count);
    }
    const auto scope = read<std::string>(doc, "pivot_scope", "global");
    if (scope == "global") c.pivot_scope = PivotScope::Global;
    else if (scope == "per-pair") c.pivot_scope = PivotScope::PerPair;
    else config_error("pivot_scope must be 'global' or 'per-pair'");

    if (doc.contains("organisms")) {
      if (!doc["organisms"].is_array()) config_error("organisms must be an array");
      for (const auto& o : doc["organisms"]) {
        check_keys(o, {"name", "path", "format"}, "organisms[]");
        GenomeSource src;
        src.path = resolve(base_dir, read<std::string>(o, "path", ""));
        src.organism = read<std::string>(o, "name", src.path.stem().string());
        src.format = parse_genome_format(read<std::string>(o, "format", "fasta"));
        c.genomes.push_back(std::move(src));
      }
    }
    c.ngrams = read<std::vector<int>>(doc, "ngrams", c.ngrams);
    const auto policy = read<std::string>(doc, "invalid_bases", "reject");
    if (policy == "reject") c.base_policy = InvalidBasePolicy::Reject;
    else if (policy == "clean") c.base_policy = InvalidBasePolicy::Clean;
    else config_error("invalid_bases must be 'reject' or 'clean'");

    if (doc.contains("embedding")) {
      const auto& e = doc["embedding"];
      check_keys(e, {"dim", "window", "subsample", "negatives", "epochs", "initial_lr", "min_count",
                     "fixed_window", "threads"},
                 "embedding");
      auto& m = c.embedding;
      m.dim = read<std::uint32_t>(e, "dim", m.dim);
      m.window = read<std::uint32_t>(e, "window", m.window);
      m.subsample = read<double>(e, "subsample", m.subsample);
      m.negatives = read<std::uint32_t>(e, "negatives", m.negatives);
      m.epochs = read<std::uint32_t>(e, "epochs", m.epochs);
      m.initial_lr = read<double>(e, "initial_lr", m.initial_lr);
      m.min_count = read<std::uint64_t>(e, "min_count", m.min_count);
      m.fixed_window = read<bool>(e, "fixed_window", m.fixed_window);
      m.threads = read<std::uint32_t>(e, "threads", m.threads);
    }
    c.output_dir = resolve(base_dir, read<std::string>(doc, "output", "weld-out"));
    if (doc.contains("annotations"))
      c.annotations = resolve(base_dir, read<std::string>(doc, "annotations", ""));
    c.seed = read<std::uint64_t>(doc, "seed", c.seed);
    c.threads = read<std::uint32_t>(doc, "threads", c.threads);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    config_error(e.what());
  }
  c.embedding.seed = c.seed;
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto config = from_json(ss.str(), path.parent_path());
  if (const char* out = std::getenv("WELD_OUT_DIR"); out != nullptr && *out != '\0')
    config.output_dir = out;
  return config;
}

std::string RunConfig::to_json() const {
  json doc;
  doc["workflow"] = workflow_name(workflow);
  doc["embedding"] = embedding_json(embedding);
  doc["embedding"].erase("seed");  // always taken from the top-level seed
  doc["seed"] = seed;
  doc["threads"] = threads;
  doc["output"] = output_dir.generic_string();
  if (annotations) doc["annotations"] = annotations->generic_string();
  if (workflow == Workflow::Natural) {
    doc["corpus"] = {{"path", corpus_dir.generic_string()},
                     {"format", corpus_format == CorpusFormat::Tsv ? "tsv" : "bible-xml"}};
    doc["pivot"] = pivot;
    doc["languages"] = languages;
    doc["tokenize"] = {{"punctuation", tokenize.punctuation == PunctuationMode::Delete ? "delete" : "split"},
                       {"lowercase", tokenize.lowercase}};
    doc["alignment"] = {{"threshold", alignment.threshold},
                        {"iterations", alignment.iterations},
                        {"min_count", alignment.min_count}};
    doc["pivot_scope"] = pivot_scope == PivotScope::Global ? "global" : "per-pair";
  } else {
    auto organisms = json::array();
    for (const auto& g : genomes)
      organisms.push_back({{"name", g.organism},
                           {"path", g.path.generic_string()},
                           {"format", g.format == GenomeFormat::Fasta ? "fasta" : "tsv"}});
    doc["organisms"] = std::move(organisms);
    doc["ngrams"] = ngrams;
    doc["invalid_bases"] = base_policy == InvalidBasePolicy::Reject ? "reject" : "clean";
  }
  return doc.dump(2) + "\n";
}

void RunConfig::validate() const {
  try {
    embedding.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (threads < 1) config_error("threads must be >= 1");
  if (output_dir.empty()) config_error("output directory is empty");
  if (workflow == Workflow::Natural) {
    if (corpus_dir.empty()) config_error("natural workflow needs corpus.path");
    if (pivot.empty()) config_error("natural workflow needs a pivot language");
    if (!(alignment.threshold > 0.0 && alignment.threshold <= 1.0))
      config_error("alignment.threshold must be in (0, 1]");
    if (alignment.iterations < 1) config_error("alignment.iterations must be >= 1");
    if (alignment.min_count < 1) config_error("alignment.min_count must be >= 1");
    if (!languages.empty() && languages.size() < 2) config_error("at least 2 languages required");
  } else {
    if (genomes.size() < 2) config_error("genome workflow needs at least 2 organisms");
    std::set<std::string> names;
    for (const auto& g : genomes)
      if (!names.insert(g.organism).second) config_error("duplicate organism '" + g.organism + "'");
    if (ngrams.empty()) config_error("ngrams must be non-empty");
    for (int n : ngrams)
      if (n < kMinNgram || n > kMaxNgram) config_error("ngrams must be a subset of {3, 4, 5, 6}");
  }
}

// -------------------------------------------------------------- manifest --

std::size_t RunManifest::count(std::string_view kind) const {
  return static_cast<std::size_t>(
      std::count_if(artifacts.begin(), artifacts.end(), [&](const auto& a) { return a.kind == kind; }));
}

std::string RunManifest::to_json() const {
  json doc;
  doc["tool"] = "weld";
  doc["version"] = tool_version;
  doc["workflow"] = workflow;
  doc["config_hash"] = config_hash;
  doc["seed"] = seed;
  auto list = json::array();
  for (const auto& a : artifacts) {
    json entry{{"kind", a.kind}, {"name", a.name}, {"path", a.path}, {"sha256", a.sha256}};
    if (a.cache_hit) entry["cache"] = *a.cache_hit ? "hit" : "miss";
    list.push_back(std::move(entry));
  }
  doc["artifacts"] = std::move(list);
  doc["timings"] = timings;
  doc["cache"] = {{"hits", cache_hits}, {"misses", cache_misses}};
  doc["warnings"] = warnings;
  return doc.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    RunManifest m;
    m.tool_version = doc.at("version").get<std::string>();
    m.workflow = doc.at("workflow").get<std::string>();
    m.config_hash = doc.at("config_hash").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& a : doc.at("artifacts")) {
      ArtifactRecord r{a.at("kind").get<std::string>(), a.at("name").get<std::string>(),
                       a.at("path").get<std::string>(), a.at("sha256").get<std::string>(), std::nullopt};
      if (a.contains("cache")) r.cache_hit = a.at("cache").get<std::string>() == "hit";
      m.artifacts.push_back(std::move(r));
    }
    m.timings = doc.at("timings").get<std::map<std::string, double>>();
    m.cache_hits = doc.at("cache").at("hits").get<std::size_t>();
    m.cache_misses = doc.at("cache").at("misses").get<std::size_t>();
    m.warnings = doc.value("warnings", std::vector<std::string>{});
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("manifest: ") + e.what());
  }
}

void RunManifest::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << to_json();
}

RunManifest RunManifest::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::vector<std::string> RunManifest::verify(const fs::path& output_dir) const {
  std::vector<std::string> problems;
  for (const auto& a : artifacts) {
    const auto p = output_dir / a.path;
    if (!fs::exists(p)) {
      problems.push_back("missing artifact: " + a.path);
      continue;
    }
    if (sha256_file(p) != a.sha256) problems.push_back("hash mismatch: " + a.path);
  }
  return problems;
}

// --------------------------------------------------------------- running --

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Files keyed by the digest of everything that produced them. A sidecar
// `<key>.sha256` is written last, so an interrupted write is never a hit.
class ArtifactCache {
 public:
  explicit ArtifactCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  fs::path path(const std::string& key, std::string_view ext) const { return dir_ / (key + std::string(ext)); }

  bool contains(const std::string& key, std::string_view ext) const {
    const auto file = path(key, ext);
    const auto sidecar = dir_ / (key + ".sha256");
    if (!fs::exists(file) || !fs::exists(sidecar)) return false;
    std::ifstream in(sidecar);
    std::string recorded;
    in >> recorded;
    return recorded == sha256_file(file);
  }

  void commit(const std::string& key, std::string_view ext) const {
    std::ofstream(dir_ / (key + ".sha256")) << sha256_file(path(key, ext)) << '\n';
  }

 private:
  fs::path dir_;
};

// Collects artifacts from concurrent tasks.
class RunRecorder {
 public:
  RunRecorder(const RunConfig& config, fs::path out) : out_(std::move(out)) {
    manifest_.workflow = workflow_name(config.workflow);
    manifest_.config_hash = sha256_hex(config.to_json());
    manifest_.seed = config.seed;
  }

  const fs::path& out() const { return out_; }

  void add(std::string kind, std::string name, const fs::path& file, std::optional<bool> cache_hit = {}) {
    ArtifactRecord rec{std::move(kind), std::move(name), fs::relative(file, out_).generic_string(),
                       sha256_file(file), cache_hit};
    std::lock_guard lock(mutex_);
    manifest_.artifacts.push_back(std::move(rec));
  }

  void cache_result(bool hit) {
    std::lock_guard lock(mutex_);
    (hit ? manifest_.cache_hits : manifest_.cache_misses)++;
  }

  void warn(std::string w) {
    std::lock_guard lock(mutex_);
    manifest_.warnings.push_back(std::move(w));
  }

  void time(const std::string& stage, double seconds) {
    std::lock_guard lock(mutex_);
    manifest_.timings[stage] += seconds;
  }

  RunManifest finish() {
    std::sort(manifest_.artifacts.begin(), manifest_.artifacts.end(),
              [](const auto& a, const auto& b) { return a.path < b.path; });
    manifest_.save(out_ / "manifest.json");
    return manifest_;
  }

 private:
  fs::path out_;
  RunManifest manifest_;
  std::mutex mutex_;
};

template <typename Fn>
auto in_stage(const std::string& stage, const std::string& digest, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(e.code(), stage, digest, e.what());
  } catch (const fs::filesystem_error& e) {
    throw StageError(ErrorCode::Io, stage, digest, e.what());
  }
}

std::string digest_sentences(std::span<const TokenSeq> sentences) {
  Sha256 h;
  for (const auto& s : sentences) {
    for (const auto& t : s) h.update(t).update(" ");
    h.update("\n");
  }
  return h.hex_digest();
}

// Content digest of a corpus directory: file names and bytes, in name order.
std::string digest_directory(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& f : files) h.update(f.filename().string()).update("\x1f").update(sha256_file(f)).update("\n");
  return h.hex_digest();
}

std::string key_for(std::initializer_list<std::string_view> parts) {
  Sha256 h;
  h.update(kToolVersion).update("\x1f");
  for (auto p : parts) h.update(p).update("\x1f");
  return h.hex_digest();
}

// Trains (or fetches from cache) one model and publishes it at `dest`.
EmbeddingModel cached_model(const ArtifactCache& cache, RunRecorder& rec, const std::string& name,
                            std::span<const TokenSeq> sentences, const std::string& input_digest,
                            const EmbeddingConfig& config, const std::optional<Vocabulary>& vocab,
                            const fs::path& dest) {
  const auto key = key_for({"model", input_digest, embedding_json(config).dump()});
  const bool hit = cache.contains(key, ".bin");
  EmbeddingModel model;
  if (hit) {
    model = load_model(cache.path(key, ".bin"));
  } else {
    model = vocab ? train(sentences, *vocab, config) : train(sentences, config);
    save_model(model, cache.path(key, ".bin"));
    cache.commit(key, ".bin");
  }
  rec.cache_result(hit);
  fs::create_directories(dest.parent_path());
  fs::copy_file(cache.path(key, ".bin"), dest, fs::copy_options::overwrite_existing);
  rec.add("model", name, dest, hit);
  return model;
}

// Divergence over fixed models and table is reused like any other artifact;
// warnings travel with it in a `.warn` file.
DistanceMatrix cached_matrix(const ArtifactCache& cache, RunRecorder& rec, const std::string& key,
                             const std::function<DistanceMatrix(std::vector<std::string>&)>& compute,
                             const fs::path& dest, const std::string& name) {
  const bool hit = cache.contains(key, ".json");
  std::vector<std::string> warnings;
  DistanceMatrix matrix;
  if (hit) {
    matrix = DistanceMatrix::load_json(cache.path(key, ".json"));
    std::ifstream in(cache.path(key, ".warn"));
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) warnings.push_back(line);
  } else {
    matrix = compute(warnings);
    std::ofstream warn(cache.path(key, ".warn"), std::ios::binary);
    for (const auto& w : warnings) warn << w << '\n';
    warn.close();
    matrix.save_json(cache.path(key, ".json"));
    cache.commit(key, ".json");
  }
  rec.cache_result(hit);
  for (auto& w : warnings) rec.warn(std::move(w));
  fs::copy_file(cache.path(key, ".json"), dest, fs::copy_options::overwrite_existing);
  rec.add("matrix", name, dest, hit);
  return matrix;
}

void publish_clustering(RunRecorder& rec, const RunConfig& config, const DistanceMatrix& matrix,
                        const fs::path& dir, const std::string& name) {
  const auto tree = upgma(matrix);
  const auto nwk = dir / "tree.nwk";
  std::ofstream(nwk, std::ios::binary) << to_newick(tree) << '\n';
  rec.add("tree", name, nwk);

  std::optional<Annotations> annotations;
  if (config.annotations) annotations = load_annotations(*config.annotations);
  const auto* ann = annotations ? &*annotations : nullptr;
  for (auto [format, ext] : {std::pair{RenderFormat::Svg, ".svg"}, std::pair{RenderFormat::Dot, ".dot"}}) {
    const auto doc = render_dendrogram(tree, format, ann);
    const auto path = dir / (std::string("tree") + ext);
    std::ofstream(path, std::ios::binary) << doc.text;
    rec.add("render", name, path);
    if (format == RenderFormat::Svg)
      for (const auto& w : doc.warnings) rec.warn(w);
  }
}

}  // namespace

RunManifest run_natural(const RunConfig& config) {
  config.validate();
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  RunRecorder rec(config, out);
  const ArtifactCache cache(out / "cache");

  Stopwatch sw;
  const auto corpus_digest = digest_directory(config.corpus_dir);
  auto loaded = in_stage("ingest", corpus_digest, [&] {
    return load_verse_aligned(config.corpus_dir, config.corpus_format, config.tokenize);
  });
  const auto& corpus = loaded.corpus;
  std::vector<std::string> languages = config.languages.empty() ? corpus.languages() : config.languages;
  in_stage("ingest", corpus_digest, [&] {
    if (languages.size() < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 languages required");
    for (const auto& l : languages) corpus.language_index(l);
    corpus.language_index(config.pivot);
  });
  std::map<std::string, std::string> digests;
  for (const auto& l : corpus.languages()) digests[l] = digest_sentences(corpus.sentences(l));
  rec.time("ingest", sw.seconds());

  // train
  sw = Stopwatch();
  std::vector<EmbeddingModel> models(languages.size());
  parallel_for(languages.size(), config.threads, [&](std::size_t i) {
    const auto& lang = languages[i];
    models[i] = in_stage("train", digests.at(lang), [&] {
      auto m = cached_model(cache, rec, lang, corpus.sentences(lang), digests.at(lang), config.embedding,
                            std::nullopt, out / "models" / (lang + ".bin"));
      fs::create_directories(out / "vocab");
      m.vocab().save(out / "vocab" / (lang + ".tsv"));
      rec.add("vocab", lang, out / "vocab" / (lang + ".tsv"));
      return m;
    });
  });
  rec.time("train", sw.seconds());

  // align
  sw = Stopwatch();
  std::string align_inputs = digests.at(config.pivot);
  for (const auto& l : languages) align_inputs += l + ":" + digests.at(l) + ";";
  const json align_params{{"pivot", config.pivot},
                          {"threshold", config.alignment.threshold},
                          {"iterations", config.alignment.iterations},
                          {"min_count", config.alignment.min_count}};
  const auto align_key = key_for({"table", align_inputs, align_params.dump()});
  const auto table = in_stage("align", align_key, [&] {
    const bool hit = cache.contains(align_key, ".tsv");
    rec.cache_result(hit);
    if (!hit) {
      std::map<std::string, std::vector<AlignmentEntry>> per_language;
      std::mutex m;
      const auto pivot_vocab = Vocabulary::build(corpus.sentences(config.pivot), config.alignment.min_count);
      parallel_for(languages.size(), config.threads, [&](std::size_t i) {
        const auto& lang = languages[i];
        std::vector<AlignmentEntry> entries;
        if (lang == config.pivot) {
          for (const auto& w : pivot_vocab.words()) entries.push_back({w, w, 1.0});
        } else {
          const auto tm = train_translation_model(corpus, config.pivot, lang, config.alignment.iterations,
                                                  config.alignment.min_count);
          entries = extract_alignment(tm, config.alignment.threshold);
        }
        std::lock_guard lock(m);
        per_language[lang] = std::move(entries);
      });
      intersect_tables(per_language, languages, pivot_vocab).save(cache.path(align_key, ".tsv"));
      cache.commit(align_key, ".tsv");
    }
    fs::copy_file(cache.path(align_key, ".tsv"), out / "alignment.tsv", fs::copy_options::overwrite_existing);
    rec.add("table", "alignment", out / "alignment.tsv", hit);
    return AlignmentTable::load(out / "alignment.tsv");
  });
  rec.time("align", sw.seconds());

  // diverge
  sw = Stopwatch();
  std::string diverge_inputs = sha256_file(out / "alignment.tsv");
  for (const auto& l : languages) diverge_inputs += ";" + l + ":" + sha256_file(out / "models" / (l + ".bin"));
  const auto diverge_key =
      key_for({"matrix", diverge_inputs, config.pivot_scope == PivotScope::Global ? "global" : "per-pair"});
  const auto matrix = in_stage("diverge", diverge_key, [&] {
    auto m = cached_matrix(
        cache, rec, diverge_key,
        [&](std::vector<std::string>& warnings) {
          ModelSet set;
          for (std::size_t i = 0; i < languages.size(); ++i) set[languages[i]] = &models[i];
          DivergenceReport report;
          auto result = distance_matrix(set, table, languages, config.pivot_scope, &report);
          warnings = report.warnings;
          for (const auto& [lang, words] : report.missing)
            if (!words.empty())
              warnings.push_back(std::to_string(words.size()) + " pivot words dropped: missing in '" + lang + "'");
          return result;
        },
        out / "matrix.json", "distance");
    m.save_tsv(out / "matrix.tsv");
    rec.add("matrix-tsv", "distance", out / "matrix.tsv");
    return m;
  });
  rec.time("diverge", sw.seconds());

  sw = Stopwatch();
  in_stage("cluster", sha256_file(out / "matrix.json"), [&] { publish_clustering(rec, config, matrix, out, "languages"); });
  rec.time("cluster", sw.seconds());
  return rec.finish();
}

RunManifest run_genome(const RunConfig& config) {
  config.validate();
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  RunRecorder rec(config, out);
  const ArtifactCache cache(out / "cache");

  Stopwatch sw;
  std::vector<CodingRegionSet> sets(config.genomes.size());
  std::vector<std::string> digests(config.genomes.size());
  std::vector<std::string> labels;
  for (const auto& g : config.genomes) labels.push_back(g.organism);
  parallel_for(config.genomes.size(), config.threads, [&](std::size_t i) {
    const auto& g = config.genomes[i];
    const auto file_digest = fs::exists(g.path) ? sha256_file(g.path) : std::string();
    sets[i] = in_stage("ingest", file_digest, [&] {
      auto s = load_coding_regions(g.path, g.format, config.base_policy);
      if (s.sequences.empty())
        throw Error(ErrorCode::Format, "organism '" + g.organism + "' has zero sequences");
      return s;
    });
    digests[i] = key_for({file_digest, config.base_policy == InvalidBasePolicy::Reject ? "reject" : "clean"});
  });
  rec.time("ingest", sw.seconds());

  for (int n : config.ngrams) {
    const auto tag = "n" + std::to_string(n);
    const auto dir = out / "genome" / tag;
    fs::create_directories(dir);

    sw = Stopwatch();
    std::vector<Vocabulary> vocabs(sets.size());
    std::vector<EmbeddingModel> models(sets.size());
    parallel_for(sets.size(), config.threads, [&](std::size_t i) {
      in_stage("train", digests[i], [&] {
        std::vector<TokenSeq> sentences;
        for (const auto& seq : sets[i].sequences)
          for (auto& s : genome_ngram_sentences(seq, n)) sentences.push_back(std::move(s));
        if (sentences.empty())
          throw Error(ErrorCode::Format, "organism '" + labels[i] + "' yields no " + tag + " sentences");
        vocabs[i] = Vocabulary::build(sentences, config.embedding.min_count);
        models[i] = cached_model(cache, rec, labels[i] + "/" + tag, sentences, key_for({digests[i], tag}),
                                 config.embedding, vocabs[i], dir / (labels[i] + ".bin"));
      });
    });
    rec.time("train", sw.seconds());

    sw = Stopwatch();
    // Shared vocabulary: n-grams retained in every organism, lexicographic.
    std::vector<std::string> shared = vocabs[0].words();
    std::sort(shared.begin(), shared.end());
    for (std::size_t i = 1; i < vocabs.size(); ++i)
      std::erase_if(shared, [&](const std::string& w) { return !vocabs[i].contains(w); });
    const auto table = AlignmentTable::identity(shared, labels);
    table.save(dir / "alignment.tsv");
    rec.add("table", tag, dir / "alignment.tsv");
    rec.time("align", sw.seconds());

    sw = Stopwatch();
    std::string diverge_inputs = sha256_file(dir / "alignment.tsv");
    for (const auto& l : labels) diverge_inputs += ";" + l + ":" + sha256_file(dir / (l + ".bin"));
    const auto diverge_key = key_for({"matrix", diverge_inputs, "global"});
    const auto matrix = in_stage("diverge", diverge_key, [&] {
      return cached_matrix(
          cache, rec, diverge_key,
          [&](std::vector<std::string>&) {
            ModelSet set;
            for (std::size_t i = 0; i < labels.size(); ++i) set[labels[i]] = &models[i];
            return distance_matrix(set, table, labels, PivotScope::Global);
          },
          dir / "matrix.json", tag);
    });
    json heatmap = json::parse(matrix.to_json());
    heatmap["n"] = n;
    std::ofstream(out / ("heatmap_" + tag + ".json"), std::ios::binary) << heatmap.dump(2) << '\n';
    rec.add("heatmap", tag, out / ("heatmap_" + tag + ".json"));
    rec.time("diverge", sw.seconds());

    sw = Stopwatch();
    in_stage("cluster", tag, [&] { publish_clustering(rec, config, matrix, dir, tag); });
    rec.time("cluster", sw.seconds());
  }
  return rec.finish();
}

RunManifest run(const RunConfig& config) {
  return config.workflow == Workflow::Natural ? run_natural(config) : run_genome(config);
}

}  // namespace weld
