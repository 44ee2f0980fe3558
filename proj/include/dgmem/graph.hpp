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

#ifndef DGMEM_GRAPH_HPP_
#define DGMEM_GRAPH_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dgmem/encoder.hpp"
#include "dgmem/gridworld.hpp"

namespace dgmem {

struct GraphConfig {
  double d_c = 1.5;         // semantic admission threshold
  double d_s = -0.85;       // visual part of the admission threshold
  double d_e = 1.0;         // pose part of the admission threshold
  double alpha_sim = 1.0;   // weight of the visual score
  double locate_ratio = 0.5;
  int trajectory_cap = 64;  // longer transits never become edges

  // Admission requires combined score >= d_p.
  double d_p() const { return d_e + alpha_sim * d_s; }
  double d_locate() const { return locate_ratio * d_p(); }
};

struct Node {
  int id = 0;
  Feature feature;
  Pose pose;
  std::int64_t count = 0;
  double semantic = 0.0;
  std::int64_t capture_step = 0;
};

// One step of a stored trajectory: what the agent saw before acting.
struct TrajectoryStep {
  Pose pose;
  Patch patch;
  Action action = Action::Up;
  bool operator==(const TrajectoryStep&) const = default;
};

struct Edge {
  int i = 0;  // i < j
  int j = 0;
  std::int64_t count = 0;
  // Best transit seen so far; runs i -> j when `forward`, else j -> i.
  std::vector<TrajectoryStep> steps;
  bool forward = true;

  int source() const { return forward ? i : j; }
  int target() const { return forward ? j : i; }
  bool operator==(const Edge&) const = default;
};

using EdgeKey = std::pair<int, int>;

class GraphMemory {
 public:
  explicit GraphMemory(GraphConfig config = {});

  const GraphConfig& config() const { return config_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::map<EdgeKey, Edge>& edges() const { return edges_; }
  const Node& node(int id) const;
  const Edge* edge(int a, int b) const;
  bool empty() const { return nodes_.empty(); }
  int size() const { return static_cast<int>(nodes_.size()); }
  // Bumped on every topology change.
  std::uint64_t version() const { return version_; }
  std::optional<int> current() const { return current_; }

  struct Similarity {
    double pose = 0.0;      // C^e: nearest pose distance
    double visual = 0.0;    // C^s: most similar node's negative cosine
    int nearest = -1;       // argmin of the per-node combined score
    double combined = 0.0;  // that minimum
  };
  // Throws NoNodesError.
  Similarity similarity(const Feature& feature, const Pose& pose) const;
  double combined_score(const Node& n, const Feature& feature,
                        const Pose& pose) const;

  // Adds the percept as a node if it clears the semantic threshold and is
  // far enough from every node; the new node becomes current.
  std::optional<int> try_add_node(const Percept& p, std::int64_t step = 0);

  // Moves the current node to the best match when its combined score is
  // under d_locate. Visit counts grow only on arrival, not while parked.
  int localize(const Percept& p);

  // Starts a fresh pending trajectory at `p` (spawn or teleport).
  void begin_trajectory(const Percept& p);
  // Call once per env step after localize/try_add_node. Returns the edge
  // touched when the current node changed.
  std::optional<EdgeKey> record_transition(Action action, const Percept& p);
  std::size_t pending_length() const { return pending_.size(); }

  // Drops edges with count < min_count unless the edge is a bridge.
  std::vector<Edge> prune_edges(std::int64_t min_count);

  std::vector<double> goal_probabilities(double temperature) const;
  int sample_goal(double temperature, Rng& rng) const;

  // Minimum-hop path; empty when unreachable. Throws InvalidNodeError.
  std::vector<int> shortest_path(int from, int to) const;
  // Same, never traversing an edge listed in `avoid` (either direction).
  std::vector<int> shortest_path(
      int from, int to, const std::set<std::pair<int, int>>& avoid) const;
  std::optional<int> topo_distance(int from, int to) const;
  // Hop distance from `source` to every node, -1 when unreachable.
  std::vector<int> distances_from(int source) const;
  const std::set<int>& neighbors(int id) const;

  // Versioned text snapshot; restore() throws ParseError and leaves the
  // graph unchanged on failure.
  std::string snapshot() const;
  void restore(std::string_view text);
  static GraphMemory from_snapshot(std::string_view text,
                                   GraphConfig config = {});

  // Field-for-field equality with feature tolerance.
  bool same_as(const GraphMemory& other, double tol = 1e-9) const;

 private:
  void check_node(int id) const;
  void connect(int a, int b);
  void disconnect(int a, int b);
  bool connected_without(int a, int b, EdgeKey removed) const;

  GraphConfig config_;
  std::vector<Node> nodes_;
  std::map<EdgeKey, Edge> edges_;
  std::vector<std::set<int>> adjacency_;
  std::optional<int> current_;
  bool parked_ = false;
  std::optional<int> pending_from_;
  std::optional<TrajectoryStep> last_seen_;
  std::vector<TrajectoryStep> pending_;
  bool pending_overflow_ = false;
  std::uint64_t version_ = 0;
};

inline constexpr std::string_view kGraphFormat = "dgmem-graph-v1";

}  // namespace dgmem

#endif  // DGMEM_GRAPH_HPP_
