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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <regex>

#include "clustering.hpp"
#include "error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace weld;
using weld::testing::TempDir;

namespace {

DistanceMatrix random_matrix(std::mt19937_64& rng, std::size_t n, bool integer) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::uniform_int_distribution<int> k(1, 4);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('A' + i)));
  std::shuffle(labels.begin(), labels.end(), rng);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = integer ? k(rng) : u(rng);
  return DistanceMatrix(labels, v);
}

bool ultrametric(const std::vector<double>& c, std::size_t n, double tol) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (c[i * n + k] > std::max(c[i * n + j], c[j * n + k]) + tol) return false;
  return true;
}

// Canonical form that ignores child order: sorted leaf-label sets with heights.
std::set<std::pair<std::set<std::string>, double>> clades(const Dendrogram& t) {
  std::set<std::pair<std::set<std::string>, double>> out;
  for (std::size_t i = t.leaf_count(); i < t.nodes().size(); ++i) {
    std::set<std::string> labels;
    for (auto leaf : t.leaves_under(i)) labels.insert(t.node(leaf).label);
    out.insert({labels, t.node(i).height});
  }
  return out;
}

}  // namespace

TEST_SUITE("upgma") {
  TEST_CASE("two leaves") {
    const auto tree = upgma(DistanceMatrix({"A", "B"}, {0, 4, 4, 0}));
    CHECK(to_newick(tree) == "(A:2,B:2);");
  }

  TEST_CASE("three leaves") {
    const auto tree = upgma(DistanceMatrix({"A", "B", "C"}, {0, 2, 8, 2, 0, 8, 8, 8, 0}));
    CHECK(to_newick(tree) == "((A:1,B:1):3,C:4);");
    CHECK(tree.leaf_order() == std::vector<std::size_t>{0, 1, 2});
    CHECK(tree.leaves_under(tree.root()) == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("merge heights use size-weighted averages") {
    // {A,B} at 2; C sits 6 from A and 10 from B, mean 8.
    const auto tree = upgma(DistanceMatrix({"A", "B", "C"}, {0, 2, 6, 2, 0, 10, 6, 10, 0}));
    CHECK(tree.node(tree.root()).height == 4.0);
  }

  TEST_CASE("ties merge the pair with the smallest labels") {
    std::vector<double> v(16, 1.0);
    for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i * 5)] = 0.0;
    const auto t = upgma(DistanceMatrix({"D", "C", "B", "A"}, v));
    CHECK(to_newick(t) == "(((A:0.5,B:0.5):0,C:0.5):0,D:0.5);");
  }

  TEST_CASE("matches a naive implementation") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> size(2, 8);
    for (int trial = 0; trial < 300; ++trial) {
      const auto m = random_matrix(rng, size(rng), trial % 2 == 0);
      const auto tree = upgma(m);
      const auto ref = weld::testing::naive_upgma(m.labels(), m.values());
      REQUIRE(ref.size() == tree.nodes().size() - tree.leaf_count());
      for (std::size_t s = 0; s < ref.size(); ++s) {
        const auto node = tree.leaf_count() + s;
        const auto leaves = tree.leaves_under(node);
        CHECK(std::set<std::size_t>(leaves.begin(), leaves.end()) == ref[s].leaves);
        CHECK(std::abs(tree.node(node).height - ref[s].height) < 1e-12);
      }
      const auto c = tree.cophenetic();
      CHECK(ultrametric(c, m.size(), 1e-12));
      for (std::size_t i = tree.leaf_count(); i < tree.nodes().size(); ++i) {
        const auto& n = tree.node(i);
        CHECK(n.height >= tree.node(n.left).height);
        CHECK(n.height >= tree.node(n.right).height);
        CHECK(n.size == tree.node(n.left).size + tree.node(n.right).size);
      }
    }
  }

  TEST_CASE("relabelling the input permutes the leaves only") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 50; ++trial) {
      const auto m = random_matrix(rng, 7, false);
      std::vector<std::size_t> perm(m.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<std::string> labels;
      std::vector<double> v(m.size() * m.size());
      for (std::size_t i = 0; i < m.size(); ++i) {
        labels.push_back(m.labels()[perm[i]]);
        for (std::size_t j = 0; j < m.size(); ++j) v[i * m.size() + j] = m.at(perm[i], perm[j]);
      }
      const auto a = upgma(m);
      const auto b = upgma(DistanceMatrix(labels, v));
      CHECK(clades(a) == clades(b));
      CHECK(to_newick(a) == to_newick(b));
    }
  }

  TEST_CASE("invalid matrices") {
    CHECK_THROWS_AS(upgma(DistanceMatrix({"A", "B"}, {0, 1, 2, 0})), Error);
    CHECK_THROWS_AS(upgma(DistanceMatrix({"A", "B"}, {0, -1, -1, 0})), Error);
    CHECK_THROWS_AS(upgma(DistanceMatrix({"A", "A"}, {0, 1, 1, 0})), Error);
    CHECK_THROWS_AS(upgma(DistanceMatrix({"A"}, {0})), Error);
  }
}

TEST_SUITE("newick") {
  TEST_CASE("labels needing quotes") {
    const auto tree = upgma(DistanceMatrix({"Old English", "it's", "x:y"}, {0, 1, 1, 1, 0, 1, 1, 1, 0}));
    const auto s = to_newick(tree);
    CHECK(s.find("'Old English'") != std::string::npos);
    CHECK(s.find("'it''s'") != std::string::npos);
    CHECK(s.find("'x:y'") != std::string::npos);
  }

  TEST_CASE("branch lengths add up to the root height") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      const auto tree = upgma(random_matrix(rng, 6, false));
      const auto s = to_newick(tree);
      REQUIRE(s.back() == ';');
      // Depth of every leaf: walk the string tracking the open clades, and
      // credit each branch length to all leaves written inside it.
      std::map<std::string, double> depth;
      std::vector<std::vector<std::string>> open{{}};
      std::vector<std::string> pending;
      for (std::size_t i = 0; i + 1 < s.size();) {
        const char c = s[i];
        if (c == '(') {
          open.emplace_back();
          ++i;
        } else if (c == ')') {
          pending = open.back();
          open.pop_back();
          open.back().insert(open.back().end(), pending.begin(), pending.end());
          ++i;
        } else if (c == ',') {
          ++i;
        } else if (c == ':') {
          const auto end = s.find_first_of(",);", i + 1);
          const double len = std::stod(s.substr(i + 1, end - i - 1));
          for (const auto& leaf : pending) depth[leaf] += len;
          i = end;
        } else {
          const auto end = s.find(':', i);
          const std::string label = s.substr(i, end - i);
          open.back().push_back(label);
          pending = {label};
          i = end;
        }
      }
      REQUIRE(depth.size() == 6);
      for (const auto& [leaf, d] : depth) CHECK(d == doctest::Approx(tree.node(tree.root()).height).epsilon(1e-12));
    }
  }
}

TEST_SUITE("rendering") {
  TEST_CASE("svg with family colours") {
    const auto tree = upgma(DistanceMatrix({"en", "de"}, {0, 0.2, 0.2, 0}));
    const Annotations ann{{"en", {"Germanic", "West"}}, {"de", {"Italic", ""}}, {"zz", {"Other", ""}}};
    const auto doc = render_dendrogram(tree, RenderFormat::Svg, &ann);
    CHECK(doc.text.starts_with("<?xml"));
    CHECK(doc.text.find("</svg>") != std::string::npos);

    const std::regex leaf(R"re(<text class="leaf"[^>]*fill="(#[0-9a-f]{6})">([^<]*))re");
    std::set<std::string> colors, labels;
    for (auto it = std::sregex_iterator(doc.text.begin(), doc.text.end(), leaf); it != std::sregex_iterator(); ++it) {
      colors.insert((*it)[1]);
      labels.insert((*it)[2]);
    }
    CHECK(labels == std::set<std::string>{"en", "de"});
    CHECK(colors.size() == 2);
    REQUIRE(doc.warnings.size() == 1);
    CHECK(doc.warnings[0].find("zz") != std::string::npos);
  }

  TEST_CASE("svg escapes labels") {
    const auto tree = upgma(DistanceMatrix({"a<b", "c&d"}, {0, 1, 1, 0}));
    const auto doc = render_dendrogram(tree, RenderFormat::Svg);
    CHECK(doc.text.find("a&lt;b") != std::string::npos);
    CHECK(doc.text.find("c&amp;d") != std::string::npos);
    CHECK(doc.warnings.empty());
  }

  TEST_CASE("dot output is an undirected graph with one edge per child") {
    std::mt19937_64 rng(43);
    const auto tree = upgma(random_matrix(rng, 5, false));
    const auto doc = render_dendrogram(tree, RenderFormat::Dot);
    std::istringstream in(doc.text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "graph dendrogram {");
    const std::regex node(R"(  n\d+ \[label="[^"]*"(, [a-z]+=[^\]]+)?\];)");
    const std::regex edge(R"(  n\d+ -- n\d+ \[label="[0-9.e+-]+"\];)");
    const std::regex attr(R"(  (rankdir=LR|node \[shape=plaintext\]);)");
    int nodes = 0, edges = 0;
    bool closed = false;
    while (std::getline(in, line)) {
      if (line == "}") {
        closed = true;
        continue;
      }
      if (std::regex_match(line, node)) ++nodes;
      else if (std::regex_match(line, edge)) ++edges;
      else CHECK_MESSAGE(std::regex_match(line, attr), line);
    }
    CHECK(closed);
    CHECK(nodes == 9);
    CHECK(edges == 8);
  }

  TEST_CASE("annotation files") {
    TempDir dir;
    weld::testing::write_file(dir / "a.tsv", "en\tGermanic\tWest\nfr\tItalic\n\n");
    const auto ann = load_annotations(dir / "a.tsv");
    CHECK(ann.at("en").subfamily == "West");
    CHECK(ann.at("fr").family == "Italic");
    weld::testing::write_file(dir / "bad.tsv", "en\n");
    CHECK_THROWS_AS(load_annotations(dir / "bad.tsv"), Error);
    CHECK_THROWS_AS(load_annotations(dir / "none.tsv"), Error);
    CHECK_THROWS_AS(parse_render_format("png"), Error);
  }
}
