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

#include "dgmem/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "dgmem/error.hpp"
#include "dgmem/learner.hpp"

namespace dgmem {

int localize_goal_by_cosine(const Percept& goal, const GraphMemory& graph) {
  if (graph.empty()) throw NoNodesError();
  int best = 0;
  double best_cos = -std::numeric_limits<double>::infinity();
  for (const Node& n : graph.nodes()) {
    const double c = cosine(n.feature, goal.feature);
    if (c > best_cos) {
      best_cos = c;
      best = n.id;
    }
  }
  return best;
}

int localize_goal(const Percept& goal, const GraphMemory& graph,
                  const nn::ActorCritic& model, double pose_scale) {
  if (graph.empty()) throw NoNodesError();
  nn::Matrix x(model.inputs(), graph.size());
  for (const Node& n : graph.nodes()) {
    x.col(n.id) = policy_input(n.feature, goal.feature,
                               relative_pose(n.pose, goal.pose), pose_scale);
  }
  const auto values = model.forward(x).values;
  if (!values.allFinite()) return localize_goal_by_cosine(goal, graph);
  int best = 0;
  for (int k = 1; k < graph.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

namespace {

int self_localize(const GraphMemory& graph, const Percept& p) {
  return graph.similarity(p.feature, p.pose).nearest;
}

bool arrived(const AgentState& s, Cell goal, double radius) {
  return std::hypot(s.position.x - goal.x, s.position.y - goal.y) < radius;
}

}  // namespace

EpisodeResult execute(const GridWorld& env, const GraphMemory& graph,
                      const nn::ActorCritic& model, const Encoder& encoder,
                      const NavTask& task, const NavConfig& cfg, Rng& rng,
                      std::vector<NavPlan>* plan_log) {
  EpisodeResult result;
  AgentState state = task.start;
  result.trajectory.push_back(state.position);
  auto finish = [&](bool success, std::string reason) {
    result.success = success;
    result.reason = std::move(reason);
    result.path_length = result.steps;
    result.final_cell = state.position;
    result.final_distance = std::hypot(state.position.x - task.goal_cell.x,
                                       state.position.y - task.goal_cell.y);
    return result;
  };
  if (arrived(state, task.goal_cell, cfg.success_radius)) {
    return finish(true, "arrived");
  }
  if (graph.empty()) throw NoNodesError();

  const Percept goal = perceive(encoder, task.goal_obs);
  Percept here = perceive(encoder, env.observe(state, rng));

  NavPlan plan;
  plan.goal_node = cfg.goal_localization == GoalLocalization::Value
                       ? localize_goal(goal, graph, model, cfg.pose_scale)
                       : self_localize(graph, goal);
  result.goal_node = plan.goal_node;
  // Edges whose subgoal budget expired; replanning routes around them
  // while an alternative exists.
  std::set<std::pair<int, int>> stalled;
  auto replan = [&]() {
    const int start = self_localize(graph, here);
    plan.route = graph.shortest_path(start, plan.goal_node, stalled);
    if (plan.route.empty()) plan.route = graph.shortest_path(start, plan.goal_node);
    // The start node is where the agent already is.
    plan.cursor = cfg.direct_endpoints && plan.route.size() > 1 ? 1 : 0;
    plan.subgoal_steps = 0;
    if (plan_log) plan_log->push_back(plan);
    return !plan.route.empty();
  };
  if (!replan()) return finish(false, "unreachable");

  const double d_locate = graph.config().d_locate();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  int blocked = -1;
  std::deque<Pose> recent;
  while (result.steps < cfg.max_steps) {
    // Arrival at any later subgoal moves the cursor past it.
    for (std::size_t k = plan.route.size(); k-- > plan.cursor;) {
      const Node& n = graph.node(plan.route[k]);
      if (graph.combined_score(n, here.feature, here.pose) < d_locate) {
        plan.cursor = k + 1;
        plan.subgoal_steps = 0;
        break;
      }
    }
    // With direct endpoints the goal node is only a proxy for the goal.
    const bool final_leg =
        plan.cursor + (cfg.direct_endpoints ? 1 : 0) >= plan.route.size();
    const Feature& target_feature =
        final_leg ? goal.feature : graph.node(plan.route[plan.cursor]).feature;
    const Pose target_pose =
        final_leg ? goal.pose : graph.node(plan.route[plan.cursor]).pose;

    const nn::Vector x = policy_input(here.feature, target_feature,
                                      relative_pose(here.pose, target_pose),
                                      cfg.pose_scale);
    const auto out = model.forward(x);
    int action = 0;
    out.logits.col(0).maxCoeff(&action);
    if (cfg.greedy && blocked < 0) {
      // A return to a recent pose means the greedy policy is cycling.
      for (const Pose& p : recent) {
        if (planar_distance(p, here.pose) < 0.5) {
          blocked = action;
          break;
        }
      }
    }
    if (!cfg.greedy || blocked >= 0) {
      // Greedy stalls (collisions, cycles) would repeat the same action;
      // sample the rest of the distribution instead.
      nn::Matrix prob = nn::softmax(out.logits);
      if (blocked >= 0 && prob.rows() > 1) {
        prob(blocked, 0) = 0.0;
        prob /= prob.sum();
      }
      const double u = uniform(rng);
      double acc = 0.0;
      action = static_cast<int>(prob.rows()) - 1;
      for (Eigen::Index a = 0; a < prob.rows(); ++a) {
        acc += prob(a, 0);
        if (u < acc) {
          action = static_cast<int>(a);
          break;
        }
      }
    }
    auto step = env.step(state, action_from_index(env.config().actions, action), rng);
    state = step.state;
    result.trajectory.push_back(state.position);
    recent.push_back(here.pose);
    if (static_cast<int>(recent.size()) > cfg.cycle_window) recent.pop_front();
    blocked = cfg.greedy && step.obs.collision ? action : -1;
    here = perceive(encoder, step.obs);
    ++result.steps;
    if (arrived(state, task.goal_cell, cfg.success_radius)) {
      return finish(true, "arrived");
    }
    if (++plan.subgoal_steps > cfg.subgoal_budget) {
      if (plan.replans >= cfg.max_replans) return finish(false, "replans exhausted");
      if (plan.cursor > 0 && plan.cursor < plan.route.size()) {
        const int a = plan.route[plan.cursor - 1];
        const int b = plan.route[plan.cursor];
        stalled.insert({std::min(a, b), std::max(a, b)});
      }
      ++plan.replans;
      result.replans = plan.replans;
      if (!replan()) return finish(false, "unreachable");
    }
  }
  return finish(false, "step limit");
}

}  // namespace dgmem
