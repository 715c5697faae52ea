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

#include "clustering.hpp"

#include <algorithm>
#include <numeric>

#include "error.hpp"
#include "text.hpp"

namespace weld {

Dendrogram::Dendrogram(std::size_t leaf_count, std::vector<Node> nodes)
    : leaves_(leaf_count), nodes_(std::move(nodes)) {
  if (leaves_ == 0 || nodes_.size() != 2 * leaves_ - 1)
    throw Error(ErrorCode::InvalidArgument, "dendrogram must have 2n-1 nodes");
}

std::vector<std::size_t> Dendrogram::leaf_order() const {
  std::vector<std::size_t> order;
  std::vector<std::size_t> stack{root()};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      order.push_back(i);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return order;
}

std::vector<std::size_t> Dendrogram::leaves_under(std::size_t node) const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    if (nodes_[i].is_leaf()) {
      out.push_back(i);
    } else {
      stack.push_back(nodes_[i].left);
      stack.push_back(nodes_[i].right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> Dendrogram::cophenetic() const {
  const auto n = leaves_;
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = n; i < nodes_.size(); ++i) {
    const auto left = leaves_under(nodes_[i].left);
    const auto right = leaves_under(nodes_[i].right);
    const double v = 2.0 * nodes_[i].height;
    for (auto a : left)
      for (auto b : right) d[a * n + b] = d[b * n + a] = v;
  }
  return d;
}

Dendrogram upgma(const DistanceMatrix& matrix) {
  matrix.validate();
  const auto n = matrix.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "clustering needs at least 2 labels");

  // Rank of each leaf in lexicographic label order; a cluster's key is the
  // smallest rank among its leaves.
  std::vector<std::size_t> by_label(n);
  std::iota(by_label.begin(), by_label.end(), 0);
  std::sort(by_label.begin(), by_label.end(),
            [&](auto a, auto b) { return matrix.labels()[a] < matrix.labels()[b]; });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[by_label[r]] = r;
  for (std::size_t r = 1; r < n; ++r)
    if (matrix.labels()[by_label[r]] == matrix.labels()[by_label[r - 1]])
      throw Error(ErrorCode::InvalidArgument, "duplicate label '" + matrix.labels()[by_label[r]] + "'");

  std::vector<Dendrogram::Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i].label = matrix.labels()[i];

  // Slots hold active clusters. `sum` keeps the total of cross-pair leaf
  // distances, so the mean is sum / (|A||B|); merging adds rows, which is the
  // size-weighted average update written without intermediate rounding.
  struct Cluster {
    std::size_t node;
    std::size_t size;
    std::size_t key;
  };
  std::vector<Cluster> active(n);
  std::vector<double> sum(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    active[i] = {i, 1, rank[i]};
    for (std::size_t j = 0; j < n; ++j) sum[i * n + j] = matrix.at(i, j);
  }
  std::vector<bool> alive(n, true);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = 0, bj = 0;
    double best = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double mean = sum[i * n + j] / static_cast<double>(active[i].size * active[j].size);
        auto lo = std::minmax(active[i].key, active[j].key);
        auto blo = std::minmax(active[bi].key, active[bj].key);
        if (!found || mean < best || (mean == best && lo < blo)) {
          best = mean;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (active[bj].key < active[bi].key) std::swap(bi, bj);

    Dendrogram::Node merged;
    merged.left = active[bi].node;
    merged.right = active[bj].node;
    merged.height = best / 2.0;
    merged.size = active[bi].size + active[bj].size;
    nodes.push_back(merged);

    const auto keep = std::min(bi, bj), drop = std::max(bi, bj);
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      const double s = sum[bi * n + k] + sum[bj * n + k];
      sum[keep * n + k] = sum[k * n + keep] = s;
    }
    active[keep] = {nodes.size() - 1, merged.size, std::min(active[bi].key, active[bj].key)};
    alive[drop] = false;
  }
  return Dendrogram(n, std::move(nodes));
}

namespace {

std::string newick_label(const std::string& label) {
  const bool plain = !label.empty() && label.find_first_of(" \t\n()[]':;,") == std::string::npos;
  if (plain) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

void write_newick(const Dendrogram& tree, std::size_t i, std::string& out) {
  const auto& n = tree.node(i);
  if (n.is_leaf()) {
    out += newick_label(n.label);
    return;
  }
  out += '(';
  write_newick(tree, n.left, out);
  out += ':' + text::format_double(n.height - tree.node(n.left).height) + ',';
  write_newick(tree, n.right, out);
  out += ':' + text::format_double(n.height - tree.node(n.right).height) + ')';
}

}  // namespace

std::string to_newick(const Dendrogram& tree) {
  std::string out;
  write_newick(tree, tree.root(), out);
  return out + ';';
}

}  // namespace weld
