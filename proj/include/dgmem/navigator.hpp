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

#ifndef DGMEM_NAVIGATOR_HPP_
#define DGMEM_NAVIGATOR_HPP_

#include <string>
#include <vector>

#include "dgmem/encoder.hpp"
#include "dgmem/graph.hpp"
#include "dgmem/gridworld.hpp"
#include "dgmem/nn.hpp"

namespace dgmem {

enum class GoalLocalization {
  Value,       // argmax of the critic over nodes
  Similarity,  // the pose/visual rule used for self-localization
};

struct NavConfig {
  int subgoal_budget = 30;
  int max_replans = 3;
  int max_steps = 200;
  double success_radius = 1.0;
  GoalLocalization goal_localization = GoalLocalization::Similarity;
  bool greedy = true;
  int cycle_window = 4;  // recent poses checked for greedy cycles
  // Skip the start node and pursue the goal itself after the last
  // intermediate subgoal.
  bool direct_endpoints = true;
  double pose_scale = 1.0;
};

struct NavPlan {
  int goal_node = -1;
  std::vector<int> route;
  std::size_t cursor = 0;
  int subgoal_steps = 0;
  int replans = 0;
};

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  double path_length = 0.0;     // executed env steps
  double final_distance = 0.0;  // Euclidean, true cells
  Cell final_cell;
  std::vector<Cell> trajectory;  // cells occupied, start included
  int replans = 0;
  int goal_node = -1;
  std::string reason;
};

// Critic-based goal localization: argmax over nodes of V(node, goal).
// Falls back to feature cosine when the critic is not finite. Throws
// NoNodesError.
int localize_goal(const Percept& goal, const GraphMemory& graph,
                  const nn::ActorCritic& model, double pose_scale);
// Feature-cosine goal localization used as the fallback.
int localize_goal_by_cosine(const Percept& goal, const GraphMemory& graph);

struct NavTask {
  AgentState start;
  Observation goal_obs;
  Cell goal_cell;  // used only by the environment to signal arrival
};

// Plans a minimum-hop node route and runs the local policy subgoal by
// subgoal. `plan_log`, when given, receives every plan made.
EpisodeResult execute(const GridWorld& env, const GraphMemory& graph,
                      const nn::ActorCritic& model, const Encoder& encoder,
                      const NavTask& task, const NavConfig& cfg, Rng& rng,
                      std::vector<NavPlan>* plan_log = nullptr);

}  // namespace dgmem

#endif  // DGMEM_NAVIGATOR_HPP_
