// Copyright 2026 The dgmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dgmem/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "dgmem/error.hpp"

namespace dgmem {

namespace {

const char* fill_for(Tile t) {
  if (t.is_wall()) return "#333333";
  if (t.is_landmark()) return "#f2c14e";
  return "#ffffff";
}

}  // namespace

std::string render_svg(const GridMap& map, const GraphMemory& graph,
                       Cell origin, int cell_px) {
  const int w = map.width() * cell_px;
  const int h = map.height() * cell_px;
  std::ostringstream out;
  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      w, h, w, h);
  out << "<g class=\"grid\">\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const Tile t = map.at({x, y});
      out << fmt::format(
          "<rect class=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
          "fill=\"{}\" stroke=\"#dddddd\"/>\n",
          t.is_landmark() ? "landmark" : "cell", x * cell_px, y * cell_px,
          cell_px, cell_px, fill_for(t));
    }
  }
  out << "</g>\n";

  auto centre = [&](const Node& n) {
    const double cx = (origin.x + n.pose.x + 0.5) * cell_px;
    const double cy = (origin.y + n.pose.y + 0.5) * cell_px;
    const int gx = static_cast<int>(std::lround(origin.x + n.pose.x));
    const int gy = static_cast<int>(std::lround(origin.y + n.pose.y));
    if (gx < 0 || gy < 0 || gx >= map.width() || gy >= map.height()) {
      throw Error(fmt::format("node {} lies outside the {}x{} map", n.id,
                              map.width(), map.height()));
    }
    return std::pair{cx, cy};
  };

  out << "<g class=\"edges\">\n";
  for (const auto& [key, e] : graph.edges()) {
    const auto [x1, y1] = centre(graph.node(e.i));
    const auto [x2, y2] = centre(graph.node(e.j));
    out << fmt::format(
        "<line class=\"edge\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" "
        "y2=\"{:.2f}\" stroke=\"#2b6cb0\" stroke-width=\"2\"/>\n",
        x1, y1, x2, y2);
  }
  out << "</g>\n";

  std::int64_t max_count = 1;
  for (const auto& n : graph.nodes()) max_count = std::max(max_count, n.count);
  out << "<g class=\"nodes\">\n";
  for (const auto& n : graph.nodes()) {
    const auto [cx, cy] = centre(n);
    const double r =
        cell_px * (0.15 + 0.3 * std::sqrt(static_cast<double>(n.count) /
                                          static_cast<double>(max_count)));
    out << fmt::format(
        "<circle class=\"node\" data-id=\"{}\" cx=\"{:.2f}\" cy=\"{:.2f}\" "
        "r=\"{:.2f}\" fill=\"#c53030\"/>\n",
        n.id, cx, cy, r);
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace dgmem
