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

#include <cmath>
#include <set>

#include "dgmem/agent.hpp"
#include "dgmem/baselines.hpp"
#include "dgmem/learner.hpp"
#include "dgmem/metrics.hpp"
#include "helpers.hpp"

using namespace dgmem;

TEST_SUITE("metrics") {

TEST_CASE("coverage counts distinct cells") {
  const GridMap map = make_four_rooms(0);
  CoverageTracker t(map);
  CHECK(t.coverage() == 0.0);
  t.visit(map.free_cells()[7]);
  CHECK(t.coverage() == doctest::Approx(1.0 / 256));
  t.visit(map.free_cells()[7]);
  CHECK(t.visited_count() == 1);
  CHECK(t.count(map.free_cells()[7]) == 2);
  for (Cell c : map.free_cells()) t.visit(c);
  CHECK(t.coverage() == 1.0);
  CHECK_THROWS_AS(t.visit({-1, 0}), std::out_of_range);
}

TEST_CASE("coverage of a trajectory matches a set oracle and never drops") {
  const GridWorld env(make_four_rooms(1), {});
  CoverageTracker t(env.map());
  std::set<Cell> oracle;
  RandomAgent agent(ActionSet::Cardinal, 3);
  Harness harness(env, 4, 100);
  double last = 0.0;
  harness.run(agent, 5000, [&](const StepRecord& r) {
    t.visit(r.cell);
    oracle.insert(r.cell);
    CHECK(t.coverage() >= last);
    last = t.coverage();
    CHECK(t.visited(r.cell));
    CHECK(t.count(r.cell) >= 1);
  });
  CHECK(t.visited_count() == static_cast<int>(oracle.size()));
  CHECK(t.coverage() <= 1.0);
}

TEST_CASE("spl examples") {
  CHECK(spl({{true, 10, 10}}) == 1.0);
  CHECK(spl({{true, 20, 10}}) == 0.5);
  CHECK(spl({{true, 10, 10}, {false, 3, 7}, {true, 20, 10}}) == doctest::Approx(0.5));
  CHECK(spl({{true, 0, 0}}) == 1.0);
  CHECK_THROWS_AS(spl({}), std::invalid_argument);
}

TEST_CASE("spl never exceeds sr") {
  Rng rng(5);
  std::uniform_int_distribution<int> len(0, 40);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EpisodeRecord> eps;
    for (int k = 0; k < 20; ++k) {
      EpisodeRecord e;
      e.index = k;
      e.success = std::bernoulli_distribution(0.6)(rng);
      e.shortest = len(rng);
      e.path_length = e.shortest + len(rng);
      e.dts = 0;
      eps.push_back(e);
    }
    const auto r = EvalReport::from_episodes(eps);
    CHECK(r.spl <= r.sr + 1e-12);
    CHECK(r.spl >= 0.0);
    CHECK(r.sr <= 1.0);
  }
  CHECK_THROWS_AS(EvalReport::from_episodes({}), std::invalid_argument);
}

TEST_CASE("uniformity closed forms") {
  std::vector<std::int64_t> h(300, 0);
  h[5] = 9;
  CHECK(uniformity(h, 256) == 0.0);
  h[6] = 9;
  CHECK(uniformity(h, 256) == doctest::Approx(std::log(2.0) / std::log(256.0)));
  CHECK(uniformity(h, 256) == doctest::Approx(0.125));
  std::vector<std::int64_t> flat(256, 3);
  CHECK(uniformity(flat, 256) == doctest::Approx(1.0));
  CHECK_THROWS_AS(uniformity(std::vector<std::int64_t>(4, 0), 4), std::invalid_argument);
}

TEST_CASE("geodesic distances") {
  const GridMap map = make_four_rooms(2);
  const auto cells = map.free_cells();
  CHECK(distance_to_goal(map, cells[0], cells[0]) == 0);
  const Cell c = cells[0];
  const Cell right{c.x + 1, c.y};
  if (map.passable(right)) CHECK(distance_to_goal(map, c, right) == 1);
  CHECK_FALSE(distance_to_goal(map, c, {0, 0}));
  // Distances agree with a relaxation oracle on random pairs.
  Rng rng(2);
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Cell s = cells[pick(rng)];
    std::vector<int> d(map.width() * map.height(), 1 << 20);
    d[s.y * map.width() + s.x] = 0;
    for (bool changed = true; changed;) {
      changed = false;
      for (Cell a : cells) {
        for (Cell b : {Cell{a.x + 1, a.y}, Cell{a.x - 1, a.y}, Cell{a.x, a.y + 1},
                       Cell{a.x, a.y - 1}}) {
          if (!map.passable(b)) continue;
          int& da = d[a.y * map.width() + a.x];
          const int db = d[b.y * map.width() + b.x];
          if (db + 1 < da) {
            da = db + 1;
            changed = true;
          }
        }
      }
    }
    for (int k = 0; k < 20; ++k) {
      const Cell g = cells[pick(rng)];
      CHECK(distance_to_goal(map, s, g) == d[g.y * map.width() + g.x]);
    }
  }
}

TEST_CASE("report serialization") {
  EpisodeRecord a;
  a.index = 0;
  a.start = {1, 2};
  a.goal = {3, 4};
  a.success = true;
  a.steps = 5;
  a.path_length = 5;
  a.shortest = 4;
  a.dts = 0;
  a.reason = "arrived";
  EpisodeRecord b = a;
  b.index = 1;
  b.success = false;
  b.dts.reset();
  b.reason = "step limit";
  const auto r = EvalReport::from_episodes({a, b});
  CHECK(r.sr == 0.5);
  CHECK(r.spl == doctest::Approx(0.4));
  CHECK(r.dts_excluded == 1);
  const std::string csv = r.to_csv();
  CHECK(csv.rfind("index,start_x,start_y,goal_x,goal_y,success,steps,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(r.to_json().find("\"sr\": 0.5") != std::string::npos);
}

TEST_CASE("evaluate rejects an empty episode budget") {
  const GridWorld env(make_four_rooms(0), {});
  const Encoder enc(5, 128, 7);
  const nn::ActorCritic model(policy_input_dim(128), {8, 8}, 4, 1);
  GraphMemory g;
  EvalSetup setup;
  setup.episodes = 0;
  CHECK_THROWS_AS(evaluate(env, g, model, enc, {}, setup), std::invalid_argument);
}

}  // TEST_SUITE
