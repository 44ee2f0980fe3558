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

#include "dgmem/metrics.hpp"

#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace dgmem {

CoverageTracker::CoverageTracker(const GridMap& map)
    : width_(map.width()),
      height_(map.height()),
      reachable_(map.free_count()),
      histogram_(static_cast<std::size_t>(map.width() * map.height()), 0) {}

int CoverageTracker::index(Cell c) const {
  if (c.x < 0 || c.y < 0 || c.x >= width_ || c.y >= height_) {
    throw std::out_of_range("cell outside the map");
  }
  return c.y * width_ + c.x;
}

void CoverageTracker::visit(Cell c) {
  auto& n = histogram_[index(c)];
  if (n == 0) ++visited_count_;
  ++n;
}

double CoverageTracker::coverage() const {
  if (reachable_ == 0) return 0.0;
  return static_cast<double>(visited_count_) / reachable_;
}

bool CoverageTracker::visited(Cell c) const { return count(c) > 0; }

std::int64_t CoverageTracker::count(Cell c) const {
  return histogram_[index(c)];
}

double uniformity(const std::vector<std::int64_t>& histogram, int reachable) {
  double total = 0.0;
  for (auto n : histogram) total += static_cast<double>(n);
  if (total <= 0.0) throw std::invalid_argument("empty visit histogram");
  if (reachable <= 1) return 1.0;
  double h = 0.0;
  for (auto n : histogram) {
    if (n <= 0) continue;
    const double p = static_cast<double>(n) / total;
    h -= p * std::log(p);
  }
  return h / std::log(static_cast<double>(reachable));
}

std::vector<int> grid_distances(const GridMap& map, Cell from) {
  std::vector<int> dist(static_cast<std::size_t>(map.width() * map.height()),
                        -1);
  if (!map.passable(from)) return dist;
  std::deque<Cell> queue{from};
  dist[from.y * map.width() + from.x] = 0;
  constexpr int dx[] = {0, 1, 0, -1};
  constexpr int dy[] = {-1, 0, 1, 0};
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    const int d = dist[c.y * map.width() + c.x];
    for (int k = 0; k < 4; ++k) {
      const Cell n{c.x + dx[k], c.y + dy[k]};
      if (!map.passable(n)) continue;
      int& dn = dist[n.y * map.width() + n.x];
      if (dn >= 0) continue;
      dn = d + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

std::optional<int> distance_to_goal(const GridMap& map, Cell from, Cell goal) {
  if (!map.passable(goal)) return std::nullopt;
  const int d = grid_distances(map, from)[goal.y * map.width() + goal.x];
  if (d < 0) return std::nullopt;
  return d;
}

double spl(const std::vector<SplSample>& episodes) {
  if (episodes.empty()) throw std::invalid_argument("SPL of no episodes");
  double sum = 0.0;
  for (const auto& e : episodes) {
    if (!e.success) continue;
    if (e.shortest <= 0.0) {
      sum += 1.0;
    } else {
      sum += e.shortest / std::max(e.path_length, e.shortest);
    }
  }
  return sum / static_cast<double>(episodes.size());
}

EvalReport EvalReport::from_episodes(std::vector<EpisodeRecord> episodes) {
  if (episodes.empty()) throw std::invalid_argument("no evaluation episodes");
  EvalReport r;
  std::vector<SplSample> samples;
  double dts = 0.0;
  int counted = 0;
  int hits = 0;
  for (const auto& e : episodes) {
    hits += e.success;
    samples.push_back({e.success, e.path_length,
                       static_cast<double>(e.shortest)});
    if (e.dts) {
      dts += *e.dts;
      ++counted;
    } else {
      ++r.dts_excluded;
    }
  }
  r.sr = static_cast<double>(hits) / static_cast<double>(episodes.size());
  r.spl = dgmem::spl(samples);
  r.mean_dts = counted > 0 ? dts / counted : 0.0;
  r.episodes = std::move(episodes);
  return r;
}

std::string EvalReport::to_json() const {
  using json = nlohmann::json;
  json eps = json::array();
  for (const auto& e : episodes) {
    eps.push_back({{"index", e.index},
                   {"start", {e.start.x, e.start.y}},
                   {"goal", {e.goal.x, e.goal.y}},
                   {"success", e.success},
                   {"steps", e.steps},
                   {"path_length", e.path_length},
                   {"shortest", e.shortest},
                   {"dts", e.dts ? json(*e.dts) : json(nullptr)},
                   {"replans", e.replans},
                   {"reason", e.reason}});
  }
  json curve = json::array();
  for (const auto& [step, cov] : coverage_curve) curve.push_back({step, cov});
  json doc{{"sr", sr},
           {"spl", spl},
           {"mean_dts", mean_dts},
           {"dts_excluded", dts_excluded},
           {"episodes", eps},
           {"coverage_curve", curve}};
  return doc.dump(1) + "\n";
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "index,start_x,start_y,goal_x,goal_y,success,steps,path_length,"
         "shortest,dts,replans,reason\n";
  for (const auto& e : episodes) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", e.index,
                       e.start.x, e.start.y, e.goal.x, e.goal.y,
                       e.success ? 1 : 0, e.steps, e.path_length, e.shortest,
                       e.dts ? std::to_string(*e.dts) : std::string(),
                       e.replans, e.reason);
  }
  return out.str();
}

EvalReport evaluate(const GridWorld& env, const GraphMemory& graph,
                    const nn::ActorCritic& model, const Encoder& encoder,
                    const NavConfig& nav, const EvalSetup& setup) {
  if (setup.episodes <= 0) {
    throw std::invalid_argument("no evaluation episodes");
  }
  const GridMap& map = env.map();
  const std::vector<Cell> cells = map.free_cells();
  const bool heading = env.config().actions == ActionSet::Heading;
  std::vector<EpisodeRecord> records;
  for (int k = 0; k < setup.episodes; ++k) {
    // Each episode owns its stream so records do not depend on order.
    Rng rng(setup.seed * 1000003ull + static_cast<std::uint64_t>(k));
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::uniform_int_distribution<int> yaw(0, heading ? 3 : 0);
    const Cell start = cells[pick(rng)];
    const Cell goal = cells[pick(rng)];
    NavTask task;
    task.start = env.place(start, setup.home, yaw(rng));
    task.goal_cell = goal;
    task.goal_obs = env.observe(env.place(goal, setup.home, yaw(rng)), rng);
    const EpisodeResult res = execute(env, graph, model, encoder, task, nav, rng);
    EpisodeRecord rec;
    rec.index = k;
    rec.start = start;
    rec.goal = goal;
    rec.success = res.success;
    rec.steps = res.steps;
    rec.path_length = res.path_length;
    rec.shortest = distance_to_goal(map, start, goal).value_or(0);
    rec.dts = distance_to_goal(map, res.final_cell, goal);
    rec.replans = res.replans;
    rec.reason = res.reason;
    records.push_back(std::move(rec));
  }
  return EvalReport::from_episodes(std::move(records));
}

}  // namespace dgmem
