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

#include <bit>
#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "embedding.hpp"
#include "error.hpp"

namespace weld {

namespace {

constexpr char kMagic[8] = {'W', 'E', 'L', 'D', 'E', 'M', 'B', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

template <typename T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw Error(ErrorCode::Format, path + ": truncated model file");
  return to_little(v);
}

void put_matrix(std::ostream& out, std::span<const float> m) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size_bytes()));
  } else {
    for (float x : m) put(out, x);
  }
}

std::vector<float> get_matrix(std::istream& in, std::size_t n, const std::string& path) {
  std::vector<float> m(n);
  if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(n * sizeof(float))))
    throw Error(ErrorCode::Format, path + ": truncated model matrix");
  if constexpr (std::endian::native == std::endian::big)
    for (auto& x : m) x = to_little(x);
  return m;
}

}  // namespace

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write model: " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, model.vocab().size());
  put<std::uint32_t>(out, model.dim());
  for (std::size_t i = 0; i < model.vocab().size(); ++i) {
    const auto& w = model.vocab().word(static_cast<WordId>(i));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
    put<std::uint64_t>(out, model.vocab().count(static_cast<WordId>(i)));
  }
  put_matrix(out, model.input_matrix());
  put_matrix(out, model.context_matrix());
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read model: " + path.string());
  const auto name = path.string();
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw Error(ErrorCode::Format, name + ": not a weld embedding model (bad magic)");
  const auto version = get<std::uint32_t>(in, name);
  if (version != kVersion)
    throw Error(ErrorCode::Format, name + ": unsupported model version " + std::to_string(version));
  const auto size = get<std::uint64_t>(in, name);
  const auto dim = get<std::uint32_t>(in, name);
  if (dim == 0) throw Error(ErrorCode::Format, name + ": zero dimension");

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    const auto len = get<std::uint32_t>(in, name);
    std::string w(len, '\0');
    if (!in.read(w.data(), len)) throw Error(ErrorCode::Format, name + ": truncated vocabulary");
    entries.emplace_back(std::move(w), get<std::uint64_t>(in, name));
  }
  auto input = get_matrix(in, size * dim, name);
  auto context = get_matrix(in, size * dim, name);
  EmbeddingConfig config;
  config.dim = dim;
  return EmbeddingModel(Vocabulary(std::move(entries)), config, std::move(input), std::move(context));
}

void export_text(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << model.vocab().size() << ' ' << model.dim() << '\n';
  out << std::setprecision(9);
  for (std::size_t i = 0; i < model.vocab().size(); ++i) {
    const auto id = static_cast<WordId>(i);
    out << model.vocab().word(id);
    for (double x : word_vector(model, id)) out << ' ' << static_cast<float>(x);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace weld
