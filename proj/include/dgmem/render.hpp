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

#ifndef DGMEM_RENDER_HPP_
#define DGMEM_RENDER_HPP_

#include <string>

#include "dgmem/graph.hpp"
#include "dgmem/gridworld.hpp"

namespace dgmem {

// Static SVG of the map with the graph drawn on top. Node poses are taken
// relative to `origin`. Throws Error when a node falls outside the map.
std::string render_svg(const GridMap& map, const GraphMemory& graph,
                       Cell origin, int cell_px = 20);

}  // namespace dgmem

#endif  // DGMEM_RENDER_HPP_
