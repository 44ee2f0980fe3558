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

#include <doctest.h>

#include "dgmem/error.hpp"
#include "dgmem/learner.hpp"
#include "dgmem/navigator.hpp"
#include "helpers.hpp"

using namespace dgmem;
using testing::percept_at;
using testing::unit;

namespace {

struct World {
  GridWorld env{make_four_rooms(0), EnvConfig{}};
  Encoder enc{5, 128, 7};
  Cell home = env.map().free_cells().front();

  Percept at(Cell c) const {
    Rng rng(0);
    return perceive(enc, env.observe(env.place(c, home), rng));
  }
};

// Builds a graph by walking the whole map in reading order.
GraphMemory sweep_graph(const World& w) {
  GraphMemory g;
  const auto cells = w.env.map().free_cells();
  Percept p = w.at(cells[0]);
  g.try_add_node(p);
  g.begin_trajectory(p);
  Rng rng(2);
  AgentState s = w.env.place(cells[0], w.home);
  for (int k = 0; k < 20000; ++k) {
    const Action a = action_from_index(
        ActionSet::Cardinal, std::uniform_int_distribution<int>(0, 3)(rng));
    auto r = w.env.step(s, a, rng);
    s = r.state;
    p = perceive(w.enc, r.obs);
    if (!g.empty()) g.localize(p);
    g.try_add_node(p, k);
    g.record_transition(a, p);
  }
  return g;
}

}  // namespace

TEST_SUITE("navigator") {

TEST_CASE("start inside the success radius succeeds in zero steps") {
  const World w;
  const GraphMemory empty;
  const nn::ActorCritic model(policy_input_dim(128), {16, 16}, 4, 1);
  const Cell c = w.env.map().free_cells()[40];
  NavTask task{w.env.place(c, w.home), {}, c};
  Rng rng(1);
  const auto r = execute(w.env, empty, model, w.enc, task, {}, rng);
  CHECK(r.success);
  CHECK(r.steps == 0);
  CHECK(r.path_length == 0.0);
}

TEST_CASE("a goal in another component fails as unreachable") {
  const World w;
  GraphMemory g;
  std::optional<Cell> a, b;
  for (Cell c : w.env.map().free_cells()) {
    const Percept p = w.at(c);
    if (!a) {
      if (g.try_add_node(p)) a = c;
    } else if (std::abs(c.x - a->x) + std::abs(c.y - a->y) > 10) {
      if (g.try_add_node(p)) {
        b = c;
        break;
      }
    }
  }
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(g.edges().empty());
  const nn::ActorCritic model(policy_input_dim(128), {16, 16}, 4, 1);
  Rng rng(1);
  NavTask task{w.env.place(*a, w.home),
               w.env.observe(w.env.place(*b, w.home), rng), *b};
  std::vector<NavPlan> plans;
  const auto r = execute(w.env, g, model, w.enc, task, {}, rng, &plans);
  CHECK_FALSE(r.success);
  CHECK(r.reason == "unreachable");
  CHECK(r.steps == 0);
  CHECK(r.goal_node == 1);
  REQUIRE(plans.size() == 1);
  CHECK(plans[0].route.empty());
}

TEST_CASE("critic localization takes the argmax") {
  // Value = tanh(tanh(W x)) picks out the first node-feature coordinate.
  GraphMemory g;
  g.try_add_node(percept_at(0, 0, unit(4, 0)));
  g.try_add_node(percept_at(10, 0, unit(4, 1)));
  nn::ActorCritic model(policy_input_dim(4), {3, 3}, 4, 1);
  auto params = model.parameters();
  for (nn::Parameter* p : params) p->value.setZero();
  auto find = [&](const std::string& name) {
    for (nn::Parameter* p : params) {
      if (p->name == name) return p;
    }
    FAIL("missing parameter " << name);
    return params.front();
  };
  find("fusion.0.weight")->value(0, 0) = 1.0;
  find("fusion.1.weight")->value(0, 0) = 1.0;
  find("critic.0.weight")->value(0, 0) = 1.0;
  const Percept goal = percept_at(5, 5, unit(4, 2));
  CHECK(localize_goal(goal, g, model, 1.0) == 0);
  find("fusion.0.weight")->value(0, 0) = 0.0;
  find("fusion.0.weight")->value(0, 1) = 1.0;
  CHECK(localize_goal(goal, g, model, 1.0) == 1);
  // Non-finite critic output falls back to cosine.
  find("critic.0.weight")->value(0, 0) = std::nan("");
  CHECK(localize_goal(percept_at(0, 0, unit(4, 1)), g, model, 1.0) == 1);
  CHECK_THROWS_AS(localize_goal(goal, GraphMemory{}, model, 1.0), NoNodesError);
}

TEST_CASE("cosine localization returns a node for its own capture") {
  const World w;
  const GraphMemory g = sweep_graph(w);
  REQUIRE(g.size() > 10);
  for (const Node& n : g.nodes()) {
    Percept p;
    p.feature = n.feature;
    p.pose = n.pose;
    CHECK(localize_goal_by_cosine(p, g) == n.id);
  }
}

TEST_CASE("first plan is minimum-hop and replans stay on the graph") {
  const World w;
  const GraphMemory g = sweep_graph(w);
  const nn::ActorCritic model(policy_input_dim(128), {32, 32}, 4, 3);
  const auto cells = w.env.map().free_cells();
  NavConfig cfg;
  cfg.subgoal_budget = 8;
  for (int k = 0; k < 20; ++k) {
    Rng rng(500 + k);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    const Cell s = cells[pick(rng)], goal = cells[pick(rng)];
    NavTask task{w.env.place(s, w.home),
                 w.env.observe(w.env.place(goal, w.home), rng), goal};
    std::vector<NavPlan> plans;
    const auto r = execute(w.env, g, model, w.enc, task, cfg, rng, &plans);
    CHECK(r.replans <= cfg.max_replans);
    CHECK(r.steps <= cfg.max_steps);
    CHECK(r.path_length == r.steps);
    CHECK(plans.size() <= static_cast<std::size_t>(cfg.max_replans) + 1);
    CHECK(r.trajectory.size() == static_cast<std::size_t>(r.steps) + 1);
    CHECK(r.trajectory.front() == s);
    REQUIRE_FALSE(plans.empty());
    const auto& first = plans.front().route;
    if (!first.empty()) {
      CHECK(first == g.shortest_path(first.front(), first.back()));
    }
    // Replans may detour around stalled edges but stay on the graph.
    for (const NavPlan& p : plans) {
      if (p.route.empty()) continue;
      CHECK(p.route.back() == r.goal_node);
      CHECK(p.cursor <= p.route.size());
      for (std::size_t i = 1; i < p.route.size(); ++i) {
        CHECK(g.topo_distance(p.route[i - 1], p.route[i]) == 1);
      }
    }
  }
}

}  // TEST_SUITE
