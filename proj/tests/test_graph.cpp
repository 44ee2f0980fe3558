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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dgmem/agent.hpp"
#include "dgmem/baselines.hpp"
#include "dgmem/error.hpp"
#include "dgmem/graph.hpp"
#include "helpers.hpp"

using namespace dgmem;
using testing::percept_at;
using testing::unit;

namespace {

Feature random_unit(Rng& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Feature f(dim);
  for (int k = 0; k < dim; ++k) f(k) = n(rng);
  return f.normalized();
}

std::vector<std::vector<int>> floyd_warshall(const GraphMemory& g) {
  const int n = g.size();
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [key, e] : g.edges()) d[e.i][e.j] = d[e.j][e.i] = 1;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  for (auto& row : d) {
    for (int& v : row) {
      if (v >= inf) v = -1;
    }
  }
  return d;
}

GraphMemory random_graph(Rng& rng, int n, double p) {
  std::vector<std::pair<int, int>> edges;
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return testing::graph_with_edges(n, edges);
}

// Drives the graph update rules with a random walk on FourRooms.
struct WalkResult {
  GraphMemory graph;
  std::vector<Observation> observations;
  std::vector<Action> actions;
};

WalkResult random_walk(std::uint64_t seed, int steps, double noise = 0.0) {
  EnvConfig cfg;
  cfg.noise = noise;
  const GridWorld env(make_four_rooms(seed), cfg);
  const Encoder enc(5, 128, 7);
  Rng rng(seed + 100);
  WalkResult out;
  AgentState s = env.spawn(rng);
  Observation obs = env.observe(s, rng);
  out.observations.push_back(obs);
  Percept p = perceive(enc, obs);
  out.graph.try_add_node(p);
  out.graph.begin_trajectory(p);
  for (int k = 0; k < steps; ++k) {
    const Action a = random_policy(ActionSet::Cardinal, rng);
    auto r = env.step(s, a, rng);
    s = r.state;
    p = perceive(enc, r.obs);
    if (!out.graph.empty()) out.graph.localize(p);
    out.graph.try_add_node(p, k + 1);
    out.graph.record_transition(a, p);
    out.observations.push_back(r.obs);
    out.actions.push_back(a);
  }
  return out;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("default thresholds") {
  const GraphConfig c;
  CHECK(c.d_c == 1.5);
  CHECK(c.d_s == -0.85);
  CHECK(c.d_e == 1.0);
  CHECK(c.alpha_sim == 1.0);
  CHECK(c.d_p() == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(c.d_locate() == doctest::Approx(0.075).epsilon(1e-12));
}

TEST_CASE("similarity of an existing node's own capture") {
  GraphMemory g;
  g.try_add_node(percept_at(2.0, 3.0, unit(4, 1)));
  const auto s = g.similarity(unit(4, 1), {2.0, 3.0, 0.0});
  CHECK(s.pose == 0.0);
  CHECK(s.visual == -1.0);
  CHECK(s.nearest == 0);
}

TEST_CASE("similarity takes the minimum pose distance") {
  GraphMemory g;
  g.try_add_node(percept_at(0.0, 0.0, unit(4, 0)));
  g.try_add_node(percept_at(3.0, 4.0, unit(4, 1)));
  REQUIRE(g.size() == 2);
  const auto s = g.similarity(unit(4, 2), {0.0, 0.0, 0.0});
  CHECK(s.pose == 0.0);
  CHECK(s.visual == 0.0);
  CHECK(s.nearest == 0);
}

TEST_CASE("similarity matches an exhaustive scan") {
  Rng rng(8);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    GraphMemory g;
    std::vector<Percept> added;
    while (g.size() < 20) {
      Percept p = percept_at(coord(rng), coord(rng), random_unit(rng, 16));
      if (g.try_add_node(p)) added.push_back(p);
    }
    const Feature f = random_unit(rng, 16);
    const Pose q{coord(rng), coord(rng), 0.0};
    double pose = 1e300, visual = 1e300, best = 1e300;
    int nearest = -1;
    for (int k = 0; k < 20; ++k) {
      const double e = std::hypot(added[k].pose.x - q.x, added[k].pose.y - q.y);
      const double v = -added[k].feature.dot(f);
      pose = std::min(pose, e);
      visual = std::min(visual, v);
      if (e + v < best) {
        best = e + v;
        nearest = k;
      }
    }
    const auto s = g.similarity(f, q);
    CHECK(s.pose == doctest::Approx(pose).epsilon(1e-12));
    CHECK(s.visual == doctest::Approx(visual).epsilon(1e-12));
    CHECK(s.nearest == nearest);
    CHECK(s.combined == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("empty graph queries signal no nodes") {
  GraphMemory g;
  CHECK_THROWS_AS(g.similarity(unit(4, 0), {}), NoNodesError);
  CHECK_THROWS_AS(g.localize(percept_at(0, 0, unit(4, 0))), NoNodesError);
  Rng rng(1);
  CHECK_THROWS_AS(g.sample_goal(1.0, rng), NoNodesError);
}

TEST_CASE("admission rules") {
  GraphMemory g;
  CHECK(g.try_add_node(percept_at(0, 0, unit(4, 0))) == 0);
  CHECK(g.node(0).count == 1);
  CHECK(g.current() == 0);
  // Novel but featureless.
  CHECK_FALSE(g.try_add_node(percept_at(50, 50, unit(4, 1), 0.0)));
  CHECK_FALSE(g.try_add_node(percept_at(50, 50, unit(4, 1), 1.4)));
  // Identical to the existing node.
  CHECK_FALSE(g.try_add_node(percept_at(0, 0, unit(4, 0))));
  CHECK(g.size() == 1);
  CHECK(g.try_add_node(percept_at(50, 50, unit(4, 1), 1.5)) == 1);
  CHECK(g.current() == 1);
}

TEST_CASE("localize moves to a close match and counts arrivals only") {
  GraphMemory g;
  g.try_add_node(percept_at(0, 0, unit(4, 0)));
  g.try_add_node(percept_at(10, 0, unit(4, 1)));
  CHECK(g.localize(percept_at(0, 0, unit(4, 0))) == 0);
  CHECK(g.node(0).count == 2);
  // Parked at node 0: no dwell counting.
  g.localize(percept_at(0, 0, unit(4, 0)));
  CHECK(g.node(0).count == 2);
  // Far from everything: stays, no change.
  CHECK(g.localize(percept_at(5, 5, unit(4, 2))) == 0);
  CHECK(g.node(0).count == 2);
  CHECK(g.node(1).count == 1);
  // Leaving and coming back is an arrival.
  g.localize(percept_at(0, 0, unit(4, 0)));
  CHECK(g.node(0).count == 3);
}

TEST_CASE("localization sequence matches an oracle replay") {
  const WalkResult w = random_walk(3, 3000);
  const Encoder enc(5, 128, 7);
  const GraphConfig cfg;
  // Oracle over the final node set: nodes captured before a step are the
  // ones with a smaller capture step.
  GraphMemory g;
  int checked = 0;
  Percept p0 = perceive(enc, w.observations[0]);
  g.try_add_node(p0);
  g.begin_trajectory(p0);
  std::optional<int> expected = g.current();
  for (std::size_t k = 1; k < w.observations.size(); ++k) {
    const Percept p = perceive(enc, w.observations[k]);
    if (!g.empty()) {
      double best = 1e300;
      int arg = -1;
      for (const Node& n : g.nodes()) {
        const double c = planar_distance(n.pose, p.pose) - n.feature.dot(p.feature);
        if (c < best) {
          best = c;
          arg = n.id;
        }
      }
      if (best < cfg.d_locate()) expected = arg;
      CHECK(g.localize(p) == *expected);
      ++checked;
    }
    if (auto id = g.try_add_node(p, static_cast<std::int64_t>(k))) expected = *id;
    g.record_transition(w.actions[k - 1], p);
  }
  CHECK(checked == 3000);
  CHECK(g.same_as(w.graph));
}

TEST_CASE("record transition creates and updates edges") {
  GraphMemory g;
  const Percept u = percept_at(0, 0, unit(4, 0));
  const Percept w = percept_at(10, 0, unit(4, 1));
  const Percept mid = percept_at(5, 5, unit(4, 2), 0.0);
  g.try_add_node(u);
  g.try_add_node(w);
  auto transit = [&](int actions) {
    g.localize(u);
    g.begin_trajectory(u);
    for (int k = 0; k < actions - 1; ++k) {
      g.localize(mid);
      CHECK_FALSE(g.record_transition(Action::Right, mid));
    }
    g.localize(w);
    return g.record_transition(Action::Right, w);
  };
  // Staying put changes nothing.
  g.localize(u);
  g.begin_trajectory(u);
  g.localize(u);
  CHECK_FALSE(g.record_transition(Action::Up, u));
  CHECK(g.edges().empty());

  CHECK(transit(4) == EdgeKey{0, 1});
  REQUIRE(g.edge(0, 1) != nullptr);
  CHECK(g.edge(0, 1)->count == 1);
  CHECK(g.edge(0, 1)->steps.size() == 4);
  CHECK(g.edge(0, 1)->source() == 0);
  transit(2);
  CHECK(g.edge(1, 0)->count == 2);
  CHECK(g.edge(0, 1)->steps.size() == 2);
  transit(5);
  CHECK(g.edge(0, 1)->count == 3);
  CHECK(g.edge(0, 1)->steps.size() == 2);
}

TEST_CASE("transits over the cap never become edges") {
  GraphConfig cfg;
  cfg.trajectory_cap = 3;
  GraphMemory g(cfg);
  const Percept u = percept_at(0, 0, unit(4, 0));
  const Percept w = percept_at(10, 0, unit(4, 1));
  const Percept mid = percept_at(5, 5, unit(4, 2), 0.0);
  g.try_add_node(u);
  g.try_add_node(w);
  g.localize(u);
  g.begin_trajectory(u);
  for (int k = 0; k < 5; ++k) {
    g.localize(mid);
    g.record_transition(Action::Right, mid);
  }
  g.localize(w);
  CHECK_FALSE(g.record_transition(Action::Right, w));
  CHECK(g.edges().empty());
}

TEST_CASE("pruning keeps bridges") {
  SUBCASE("nothing below the threshold") {
    GraphMemory g = testing::graph_with_edges(3, {{0, 1}, {1, 2}, {0, 1}, {1, 2}});
    CHECK(g.prune_edges(2).empty());
    CHECK(g.edges().size() == 2);
  }
  SUBCASE("triangle drops its weak edge") {
    GraphMemory g = testing::graph_with_edges(
        3, {{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 2}, {1, 2}, {1, 2},
            {1, 2}, {1, 2}, {0, 2}});
    const auto removed = g.prune_edges(2);
    REQUIRE(removed.size() == 1);
    CHECK(removed[0].i == 0);
    CHECK(removed[0].j == 2);
    CHECK(g.topo_distance(0, 2) == 2);
  }
  SUBCASE("path of bridges is kept") {
    GraphMemory g = testing::graph_with_edges(3, {{0, 1}, {1, 2}});
    CHECK(g.prune_edges(2).empty());
    CHECK(g.edges().size() == 2);
  }
}

TEST_CASE("pruning never changes connectivity on random graphs") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    GraphMemory g = random_graph(rng, 12, 0.25);
    const auto before = floyd_warshall(g);
    g.prune_edges(2);
    const auto after = floyd_warshall(g);
    for (int i = 0; i < g.size(); ++i) {
      for (int j = 0; j < g.size(); ++j) {
        CHECK((before[i][j] >= 0) == (after[i][j] >= 0));
      }
    }
  }
}

TEST_CASE("goal probabilities follow the closed form") {
  GraphMemory g = testing::graph_with_edges(2, {});
  // Both nodes have count 1.
  auto p = g.goal_probabilities(1.0);
  CHECK(p[0] == doctest::Approx(0.5));
  g.localize(percept_at(0, 0, unit(2, 0)));  // node 0 count 2
  p = g.goal_probabilities(1.0);
  CHECK(p[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK_THROWS_AS(g.goal_probabilities(0.0), Error);
}

TEST_CASE("goal probabilities are shift invariant and normalized") {
  GraphMemory g = testing::graph_with_edges(4, {});
  const auto base = g.goal_probabilities(0.7);
  // Raising every count by one leaves the distribution.
  for (int k = 0; k < 4; ++k) {
    g.localize(percept_at(10.0 * ((k + 1) % 4), 0, unit(4, (k + 1) % 4)));
  }
  const auto shifted = g.goal_probabilities(0.7);
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    CHECK(shifted[k] == doctest::Approx(base[k]).epsilon(1e-12));
    sum += shifted[k];
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("shortest paths") {
  const GraphMemory g = testing::graph_with_edges(3, {{0, 1}, {1, 2}});
  CHECK(g.shortest_path(1, 1) == std::vector<int>{1});
  CHECK(g.shortest_path(0, 2) == std::vector<int>{0, 1, 2});
  CHECK(g.topo_distance(0, 2) == 2);
  CHECK(g.topo_distance(2, 2) == 0);
  CHECK_THROWS_AS(g.shortest_path(0, 7), InvalidNodeError);
  const GraphMemory split = testing::graph_with_edges(3, {{0, 1}});
  CHECK(split.shortest_path(0, 2).empty());
  CHECK_FALSE(split.topo_distance(0, 2));
}

TEST_CASE("ties expand the lowest id first") {
  // 0-1-3 and 0-2-3 are both shortest.
  const GraphMemory g = testing::graph_with_edges(4, {{0, 2}, {2, 3}, {0, 1}, {1, 3}});
  CHECK(g.shortest_path(0, 3) == std::vector<int>{0, 1, 3});
}

TEST_CASE("avoided edges are never traversed") {
  const GraphMemory g = testing::graph_with_edges(4, {{0, 2}, {2, 3}, {0, 1}, {1, 3}});
  CHECK(g.shortest_path(0, 3, {{1, 3}}) == std::vector<int>{0, 2, 3});
  CHECK(g.shortest_path(3, 0, {{0, 1}}) == std::vector<int>{3, 2, 0});
  CHECK(g.shortest_path(0, 3, {{1, 3}, {0, 2}}).empty());
  CHECK(g.shortest_path(0, 0, {{0, 1}}) == std::vector<int>{0});
}

TEST_CASE("snapshot round trip") {
  SUBCASE("empty graph") {
    GraphMemory g;
    const GraphMemory back = GraphMemory::from_snapshot(g.snapshot());
    CHECK(back.empty());
    CHECK(back.same_as(g));
  }
  SUBCASE("four rooms walk graph") {
    const WalkResult w = random_walk(0, 4000);
    const std::string text = w.graph.snapshot();
    CHECK(text.rfind(std::string(kGraphFormat) + "\n", 0) == 0);
    const GraphMemory back = GraphMemory::from_snapshot(text);
    CHECK(back.same_as(w.graph));
    CHECK(back.snapshot() == text);
  }
}

TEST_CASE("malformed snapshots leave the graph untouched") {
  const WalkResult w = random_walk(1, 2000);
  const std::string text = w.graph.snapshot();
  GraphMemory target = testing::graph_with_edges(3, {{0, 1}});
  const std::string before = target.snapshot();
  CHECK_THROWS_AS(target.restore(text.substr(0, text.size() / 2)), ParseError);
  CHECK(target.snapshot() == before);
  CHECK_THROWS_AS(target.restore("dgmem-graph-v0\n{}"), ParseError);
  CHECK_THROWS_AS(target.restore(""), ParseError);
  CHECK(target.snapshot() == before);
  try {
    target.restore(text.substr(0, 100));
  } catch (const ParseError& e) {
    CHECK(e.offset() > 0);
    CHECK(e.offset() <= 101);
  }
}

}  // TEST_SUITE

TEST_SUITE("property.topology") {

TEST_CASE("bfs distances equal floyd-warshall on random graphs") {
  Rng rng(2025);
  std::uniform_int_distribution<int> size(2, 64);
  std::uniform_real_distribution<double> density(0.02, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    const GraphMemory g = random_graph(rng, size(rng), density(rng));
    const auto fw = floyd_warshall(g);
    for (int i = 0; i < g.size(); ++i) {
      const auto d = g.distances_from(i);
      for (int j = 0; j < g.size(); ++j) {
        REQUIRE(d[j] == fw[i][j]);
        const auto topo = g.topo_distance(i, j);
        const auto path = g.shortest_path(i, j);
        if (fw[i][j] < 0) {
          CHECK_FALSE(topo);
          CHECK(path.empty());
        } else {
          CHECK(*topo == fw[i][j]);
          REQUIRE(path.size() == static_cast<std::size_t>(fw[i][j]) + 1);
          CHECK(path.front() == i);
          CHECK(path.back() == j);
          for (std::size_t k = 1; k < path.size(); ++k) {
            CHECK(g.edge(path[k - 1], path[k]) != nullptr);
          }
        }
      }
    }
  }
}

}  // TEST_SUITE

TEST_SUITE("property.sparsity") {

TEST_CASE("sparsity holds after long random episodes") {
  for (double noise : {0.0, 0.2}) {
    for (std::uint64_t seed : {0u, 1u}) {
      WalkResult w = random_walk(seed, 10000, noise);
      const GraphMemory& g = w.graph;
      const double dp = g.config().d_p();
      for (const Node& a : g.nodes()) {
        CHECK(a.semantic >= g.config().d_c);
        CHECK(std::abs(a.feature.norm() - 1.0) < 1e-9);
      }
      // The admission rule compares a candidate with every earlier node.
      for (int j = 1; j < g.size(); ++j) {
        double pose = 1e300, visual = 1e300;
        for (int i = 0; i < j; ++i) {
          pose = std::min(pose, planar_distance(g.node(i).pose, g.node(j).pose));
          visual = std::min(visual, -g.node(i).feature.dot(g.node(j).feature));
        }
        CHECK(pose + g.config().alpha_sim * visual >= dp);
      }
      for (const auto& [key, e] : g.edges()) {
        CHECK(e.i < e.j);
        CHECK(e.i >= 0);
        CHECK(e.j < g.size());
        CHECK(e.count >= 1);
        CHECK_FALSE(e.steps.empty());
      }
      std::map<EdgeKey, std::size_t> lengths;
      (void)lengths;
      CHECK(g.current().has_value());
    }
  }
}

TEST_CASE("stored trajectory lengths never grow") {
  const GridWorld env(make_four_rooms(2), {});
  const Encoder enc(5, 128, 7);
  Rng rng(4);
  GraphMemory g;
  AgentState s = env.spawn(rng);
  Percept p = perceive(enc, env.observe(s, rng));
  g.try_add_node(p);
  g.begin_trajectory(p);
  std::map<EdgeKey, std::size_t> lengths;
  for (int k = 0; k < 10000; ++k) {
    const Action a = random_policy(ActionSet::Cardinal, rng);
    auto r = env.step(s, a, rng);
    s = r.state;
    p = perceive(enc, r.obs);
    if (!g.empty()) g.localize(p);
    g.try_add_node(p, k);
    if (auto key = g.record_transition(a, p)) {
      const std::size_t now = g.edges().at(*key).steps.size();
      if (lengths.count(*key)) CHECK(now <= lengths[*key]);
      lengths[*key] = now;
    }
  }
  CHECK(lengths.size() > 10);
}

TEST_CASE("replaying logged observations reproduces the graph") {
  const WalkResult w = random_walk(5, 5000);
  const Encoder enc(5, 128, 7);
  GraphMemory g;
  Percept p = perceive(enc, w.observations[0]);
  g.try_add_node(p);
  g.begin_trajectory(p);
  for (std::size_t k = 1; k < w.observations.size(); ++k) {
    p = perceive(enc, w.observations[k]);
    if (!g.empty()) g.localize(p);
    g.try_add_node(p, static_cast<std::int64_t>(k));
    g.record_transition(w.actions[k - 1], p);
  }
  CHECK(g.snapshot() == w.graph.snapshot());
}

}  // TEST_SUITE

TEST_SUITE("property.sampler") {

TEST_CASE("goal sampler matches the closed form over 1e5 draws") {
  // Counts (1, 2, 3) after two and one extra arrivals.
  GraphMemory g = testing::graph_with_edges(3, {});
  g.localize(percept_at(10, 0, unit(3, 1)));
  g.localize(percept_at(20, 0, unit(3, 2)));
  g.localize(percept_at(10, 0, unit(3, 1)));
  g.localize(percept_at(20, 0, unit(3, 2)));
  g.localize(percept_at(0, 0, unit(3, 0)));
  g.localize(percept_at(20, 0, unit(3, 2)));
  REQUIRE(g.node(0).count == 2);
  REQUIRE(g.node(1).count == 3);
  REQUIRE(g.node(2).count == 4);
  const double z = 1.0 + std::exp(-1.0) + std::exp(-2.0);
  const double expected[] = {1.0 / z, std::exp(-1.0) / z, std::exp(-2.0) / z};
  Rng rng(77);
  std::vector<int> hits(3, 0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) ++hits[g.sample_goal(1.0, rng)];
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(static_cast<double>(hits[k]) / n - expected[k]) < 0.01);
  }
}

}  // TEST_SUITE
