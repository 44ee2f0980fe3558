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

#ifndef DGMEM_TESTS_HELPERS_HPP_
#define DGMEM_TESTS_HELPERS_HPP_

#include <set>
#include <vector>

#include "dgmem/encoder.hpp"
#include "dgmem/graph.hpp"
#include "dgmem/gridworld.hpp"

namespace dgmem::testing {

// Cells reachable from `start` by 4-neighbour moves, found by an explicit
// stack flood fill.
inline std::set<Cell> flood_fill(const GridMap& map, Cell start) {
  std::set<Cell> seen;
  std::vector<Cell> stack{start};
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    if (!map.in_bounds(c) || map.at(c).is_wall() || seen.count(c)) continue;
    seen.insert(c);
    stack.push_back({c.x + 1, c.y});
    stack.push_back({c.x - 1, c.y});
    stack.push_back({c.x, c.y + 1});
    stack.push_back({c.x, c.y - 1});
  }
  return seen;
}

inline Percept percept_at(double x, double y, const Feature& f,
                          double semantic = 5.0) {
  Percept p;
  p.feature = f;
  p.pose = {x, y, 0.0};
  p.semantic = semantic;
  p.patch.size = 1;
  p.patch.tiles = {Tile::free_space()};
  return p;
}

inline Feature unit(int dim, int axis) {
  Feature f = Feature::Zero(dim);
  f(axis) = 1.0;
  return f;
}

// A graph whose nodes are far apart with orthogonal features, connected
// by the given undirected edges.
inline GraphMemory graph_with_edges(int n,
                                    const std::vector<std::pair<int, int>>& e) {
  GraphMemory g;
  for (int k = 0; k < n; ++k) {
    g.try_add_node(percept_at(10.0 * k, 0.0, unit(n, k)), k);
  }
  for (auto [a, b] : e) {
    g.localize(percept_at(10.0 * a, 0.0, unit(n, a)));
    g.begin_trajectory(percept_at(10.0 * a, 0.0, unit(n, a)));
    g.localize(percept_at(10.0 * b, 0.0, unit(n, b)));
    g.record_transition(Action::Right, percept_at(10.0 * b, 0.0, unit(n, b)));
  }
  return g;
}

}  // namespace dgmem::testing

#endif  // DGMEM_TESTS_HELPERS_HPP_
