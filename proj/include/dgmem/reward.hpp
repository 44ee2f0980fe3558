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

#ifndef DGMEM_REWARD_HPP_
#define DGMEM_REWARD_HPP_

#include <set>

#include "dgmem/graph.hpp"

namespace dgmem {

struct RewardConfig {
  double alpha = 0.2;          // topological progress coefficient
  double novelty = 0.05;       // first-visit bonus c
  double success = 1.0;        // arrival bonus
  double success_radius = 1.0; // cells
};

struct RewardBreakdown {
  double r_d = 0.0;
  double r_n = 0.0;
  double r_s = 0.0;
  double total = 0.0;
  bool done = false;
  bool unreachable = false;  // r_d suppressed because a hop count was missing
};

// alpha * (l(prev, goal) - l(cur, goal)); 0 when either is unreachable.
double topo_progress_reward(const GraphMemory& graph, int prev, int cur,
                            int goal, double alpha, bool* unreachable = nullptr);

// Distinct nodes passed during one goal-episode.
class NoveltyTracker {
 public:
  double reward(int node, double bonus);
  void reset() { visited_.clear(); }
  std::size_t visited() const { return visited_.size(); }

 private:
  std::set<int> visited_;
};

struct SuccessResult {
  double reward = 0.0;
  bool done = false;
};

SuccessResult success_reward(const Pose& obs_pose, const Pose& goal_pose,
                             double radius, double magnitude = 1.0);

// The full per-step reward: r_d + r_n + r_s.
RewardBreakdown step_reward(const GraphMemory& graph, int prev, int cur,
                            int goal, const Pose& obs_pose,
                            NoveltyTracker& novelty, const RewardConfig& cfg);

}  // namespace dgmem

#endif  // DGMEM_REWARD_HPP_
