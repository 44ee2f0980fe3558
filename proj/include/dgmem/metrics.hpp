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

#ifndef DGMEM_METRICS_HPP_
#define DGMEM_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dgmem/encoder.hpp"
#include "dgmem/graph.hpp"
#include "dgmem/gridworld.hpp"
#include "dgmem/navigator.hpp"
#include "dgmem/nn.hpp"

// Evaluation-only ground truth. Nothing on the learning path includes this.
namespace dgmem {

class CoverageTracker {
 public:
  explicit CoverageTracker(const GridMap& map);

  void visit(Cell c);
  double coverage() const;
  int visited_count() const { return visited_count_; }
  int reachable_count() const { return reachable_; }
  bool visited(Cell c) const;
  std::int64_t count(Cell c) const;
  const std::vector<std::int64_t>& histogram() const { return histogram_; }

 private:
  int index(Cell c) const;

  int width_;
  int height_;
  int reachable_;
  int visited_count_ = 0;
  std::vector<std::int64_t> histogram_;
};

// Normalized entropy of the visit histogram over `reachable` cells.
double uniformity(const std::vector<std::int64_t>& histogram, int reachable);

// Geodesic distances in cells from `from`; -1 where unreachable.
std::vector<int> grid_distances(const GridMap& map, Cell from);
std::optional<int> distance_to_goal(const GridMap& map, Cell from, Cell goal);

struct SplSample {
  bool success = false;
  double path_length = 0.0;
  double shortest = 0.0;
};

// Throws std::invalid_argument on an empty batch.
double spl(const std::vector<SplSample>& episodes);

struct EpisodeRecord {
  int index = 0;
  Cell start;
  Cell goal;
  bool success = false;
  int steps = 0;
  double path_length = 0.0;
  int shortest = 0;
  std::optional<int> dts;  // geodesic; empty when unreachable
  int replans = 0;
  std::string reason;
};

struct EvalReport {
  double sr = 0.0;
  double spl = 0.0;
  double mean_dts = 0.0;
  int dts_excluded = 0;
  std::vector<EpisodeRecord> episodes;
  std::vector<std::pair<std::int64_t, double>> coverage_curve;

  // Throws std::invalid_argument on no episodes.
  static EvalReport from_episodes(std::vector<EpisodeRecord> episodes);
  std::string to_json() const;
  std::string to_csv() const;
};

struct EvalSetup {
  int episodes = 100;
  std::uint64_t seed = 1000;
  Cell home;  // origin of the graph's pose frame
};

// Uniform start/goal pairs, navigator rollouts, ground-truth scoring.
EvalReport evaluate(const GridWorld& env, const GraphMemory& graph,
                    const nn::ActorCritic& model, const Encoder& encoder,
                    const NavConfig& nav, const EvalSetup& setup);

}  // namespace dgmem

#endif  // DGMEM_METRICS_HPP_
