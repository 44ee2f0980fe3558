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

#include "dgmem/reward.hpp"

namespace dgmem {

double topo_progress_reward(const GraphMemory& graph, int prev, int cur,
                            int goal, double alpha, bool* unreachable) {
  if (prev == cur) {
    if (unreachable) *unreachable = false;
    return 0.0;
  }
  const auto before = graph.topo_distance(prev, goal);
  const auto after = graph.topo_distance(cur, goal);
  const bool missing = !before || !after;
  if (unreachable) *unreachable = missing;
  if (missing) return 0.0;
  return alpha * static_cast<double>(*before - *after);
}

double NoveltyTracker::reward(int node, double bonus) {
  return visited_.insert(node).second ? bonus : 0.0;
}

SuccessResult success_reward(const Pose& obs_pose, const Pose& goal_pose,
                             double radius, double magnitude) {
  if (planar_distance(obs_pose, goal_pose) < radius) return {magnitude, true};
  return {0.0, false};
}

RewardBreakdown step_reward(const GraphMemory& graph, int prev, int cur,
                            int goal, const Pose& obs_pose,
                            NoveltyTracker& novelty, const RewardConfig& cfg) {
  RewardBreakdown r;
  r.r_d = topo_progress_reward(graph, prev, cur, goal, cfg.alpha,
                               &r.unreachable);
  r.r_n = novelty.reward(cur, cfg.novelty);
  const auto s = success_reward(obs_pose, graph.node(goal).pose,
                                cfg.success_radius, cfg.success);
  r.r_s = s.reward;
  r.done = s.done;
  r.total = r.r_d + r.r_n + r.r_s;
  return r;
}

}  // namespace dgmem
