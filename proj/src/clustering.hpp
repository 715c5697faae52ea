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

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "divergence.hpp"

namespace weld {

// Binary merge tree. Nodes [0, leaf_count) are leaves in matrix label order;
// internal nodes follow in merge order and the last node is the root.
class Dendrogram {
 public:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Node {
    std::size_t left = kNone;
    std::size_t right = kNone;
    double height = 0.0;  // merge distance / 2
    std::size_t size = 1;
    std::string label;  // leaves only
    bool is_leaf() const noexcept { return left == kNone; }
  };

  Dendrogram(std::size_t leaf_count, std::vector<Node> nodes);

  std::size_t leaf_count() const noexcept { return leaves_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t root() const noexcept { return nodes_.size() - 1; }

  // Leaf indices in left-to-right drawing order.
  std::vector<std::size_t> leaf_order() const;
  // Leaf indices below `node`, sorted.
  std::vector<std::size_t> leaves_under(std::size_t node) const;
  // Leaf-to-leaf distance implied by the tree: twice the height of the lowest
  // common ancestor. Row-major, leaf label order.
  std::vector<double> cophenetic() const;

 private:
  std::size_t leaves_;
  std::vector<Node> nodes_;
};

// Average-linkage clustering. Ties go to the pair whose smallest leaf labels
// sort first; the cluster holding the smaller label becomes the left child.
Dendrogram upgma(const DistanceMatrix& matrix);

// Branch length = parent height - child height. Labels that need it are
// single-quoted.
std::string to_newick(const Dendrogram& tree);

enum class RenderFormat { Svg, Dot };

RenderFormat parse_render_format(std::string_view name);

struct LeafAnnotation {
  std::string family;
  std::string subfamily;
};

using Annotations = std::map<std::string, LeafAnnotation, std::less<>>;

// TSV rows `label<TAB>family[<TAB>subfamily]`.
Annotations load_annotations(const std::filesystem::path& path);

struct RenderedDocument {
  std::string text;
  std::vector<std::string> warnings;
};

RenderedDocument render_dendrogram(const Dendrogram& tree, RenderFormat format,
                                   const Annotations* annotations = nullptr);

}  // namespace weld
