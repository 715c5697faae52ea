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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "clustering.hpp"
#include "error.hpp"
#include "text.hpp"

namespace weld {

namespace {

constexpr const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e",
                                    "#e6ab02", "#a6761d", "#1f78b4", "#b2df8a", "#fb9a99",
                                    "#cab2d6", "#6a3d9a"};
constexpr const char* kDefaultColor = "#000000";

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Family -> colour, assigned in sorted family order.
std::map<std::string, std::string> family_colors(const Annotations& annotations) {
  std::set<std::string> families;
  for (const auto& [_, a] : annotations) families.insert(a.family);
  std::map<std::string, std::string> colors;
  std::size_t i = 0;
  for (const auto& f : families) colors[f] = kPalette[i++ % std::size(kPalette)];
  return colors;
}

std::vector<std::string> annotation_warnings(const Dendrogram& tree, const Annotations* annotations) {
  std::vector<std::string> warnings;
  if (annotations == nullptr) return warnings;
  std::set<std::string, std::less<>> leaves;
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) leaves.insert(tree.node(i).label);
  for (const auto& [label, _] : *annotations)
    if (!leaves.contains(label)) warnings.push_back("annotation label not in tree: '" + label + "'");
  return warnings;
}

std::string render_svg(const Dendrogram& tree, const Annotations* annotations) {
  constexpr double kRow = 20.0, kMargin = 20.0, kTreeWidth = 400.0, kLabelWidth = 220.0;
  const auto order = tree.leaf_order();
  const double max_height = tree.node(tree.root()).height;
  const double scale = max_height > 0.0 ? kTreeWidth / max_height : 0.0;

  std::vector<double> x(tree.nodes().size()), y(tree.nodes().size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    y[order[r]] = kMargin + kRow * static_cast<double>(r);
    x[order[r]] = kMargin + kTreeWidth;
  }
  for (std::size_t i = tree.leaf_count(); i < tree.nodes().size(); ++i) {
    const auto& n = tree.node(i);
    y[i] = (y[n.left] + y[n.right]) / 2.0;
    x[i] = kMargin + (max_height - n.height) * scale;
  }

  const auto colors = annotations ? family_colors(*annotations) : std::map<std::string, std::string>{};
  const double width = 2 * kMargin + kTreeWidth + kLabelWidth;
  const double height = 2 * kMargin + kRow * static_cast<double>(order.size());

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n"
      << "<g fill=\"none\" stroke=\"#333333\" stroke-width=\"1\">\n";
  for (std::size_t i = tree.leaf_count(); i < tree.nodes().size(); ++i) {
    const auto& n = tree.node(i);
    svg << "<path d=\"M" << num(x[n.left]) << ',' << num(y[n.left]) << " H" << num(x[i]) << " V"
        << num(y[n.right]) << " H" << num(x[n.right]) << "\"/>\n";
  }
  svg << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (auto leaf : order) {
    const auto& label = tree.node(leaf).label;
    std::string color = kDefaultColor;
    std::string title;
    if (annotations) {
      if (auto it = annotations->find(label); it != annotations->end()) {
        color = colors.at(it->second.family);
        title = it->second.family + (it->second.subfamily.empty() ? "" : " / " + it->second.subfamily);
      }
    }
    svg << "<text class=\"leaf\" x=\"" << num(x[leaf] + 4) << "\" y=\"" << num(y[leaf] + 4)
        << "\" fill=\"" << color << "\">" << xml_escape(label);
    if (!title.empty()) svg << "<title>" << xml_escape(title) << "</title>";
    svg << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::string render_dot(const Dendrogram& tree, const Annotations* annotations) {
  const auto colors = annotations ? family_colors(*annotations) : std::map<std::string, std::string>{};
  std::ostringstream dot;
  dot << "graph dendrogram {\n  rankdir=LR;\n  node [shape=plaintext];\n";
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const auto& n = tree.node(i);
    if (n.is_leaf()) {
      dot << "  n" << i << " [label=\"" << dot_escape(n.label) << '"';
      if (annotations)
        if (auto it = annotations->find(n.label); it != annotations->end())
          dot << ", fontcolor=\"" << colors.at(it->second.family) << '"';
      dot << "];\n";
    } else {
      dot << "  n" << i << " [label=\"\", shape=point];\n";
    }
  }
  for (std::size_t i = tree.leaf_count(); i < tree.nodes().size(); ++i) {
    const auto& n = tree.node(i);
    for (auto child : {n.left, n.right})
      dot << "  n" << i << " -- n" << child << " [label=\""
          << text::format_double(n.height - tree.node(child).height) << "\"];\n";
  }
  dot << "}\n";
  return dot.str();
}

}  // namespace

RenderFormat parse_render_format(std::string_view name) {
  if (name == "svg") return RenderFormat::Svg;
  if (name == "dot") return RenderFormat::Dot;
  throw Error(ErrorCode::InvalidArgument, "unknown render format '" + std::string(name) + "'");
}

Annotations load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read annotations: " + path.string());
  Annotations out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty())
      throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) +
                                        ": expected 'label<TAB>family<TAB>subfamily'");
    out[std::string(fields[0])] = {std::string(fields[1]),
                                   fields.size() > 2 ? std::string(fields[2]) : std::string()};
  }
  return out;
}

RenderedDocument render_dendrogram(const Dendrogram& tree, RenderFormat format,
                                   const Annotations* annotations) {
  RenderedDocument doc;
  doc.warnings = annotation_warnings(tree, annotations);
  doc.text = format == RenderFormat::Svg ? render_svg(tree, annotations) : render_dot(tree, annotations);
  return doc;
}

}  // namespace weld
