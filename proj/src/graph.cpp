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

#include "dgmem/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <nlohmann/json.hpp>

#include "dgmem/error.hpp"

namespace dgmem {

using json = nlohmann::json;

GraphMemory::GraphMemory(GraphConfig config) : config_(config) {}

const Node& GraphMemory::node(int id) const {
  check_node(id);
  return nodes_[id];
}

const Edge* GraphMemory::edge(int a, int b) const {
  const auto it = edges_.find({std::min(a, b), std::max(a, b)});
  return it == edges_.end() ? nullptr : &it->second;
}

void GraphMemory::check_node(int id) const {
  if (id < 0 || id >= size()) throw InvalidNodeError(id);
}

const std::set<int>& GraphMemory::neighbors(int id) const {
  check_node(id);
  return adjacency_[id];
}

double GraphMemory::combined_score(const Node& n, const Feature& feature,
                                   const Pose& pose) const {
  return planar_distance(n.pose, pose) -
         config_.alpha_sim * cosine(n.feature, feature);
}

GraphMemory::Similarity GraphMemory::similarity(const Feature& feature,
                                                const Pose& pose) const {
  if (nodes_.empty()) throw NoNodesError();
  Similarity s;
  s.pose = std::numeric_limits<double>::infinity();
  s.visual = std::numeric_limits<double>::infinity();
  s.combined = std::numeric_limits<double>::infinity();
  for (const Node& n : nodes_) {
    const double e = planar_distance(n.pose, pose);
    const double v = -cosine(n.feature, feature);
    s.pose = std::min(s.pose, e);
    s.visual = std::min(s.visual, v);
    const double c = e + config_.alpha_sim * v;
    if (c < s.combined) {
      s.combined = c;
      s.nearest = n.id;
    }
  }
  return s;
}

std::optional<int> GraphMemory::try_add_node(const Percept& p,
                                             std::int64_t step) {
  if (p.semantic < config_.d_c) return std::nullopt;
  if (!nodes_.empty()) {
    const Similarity s = similarity(p.feature, p.pose);
    if (s.pose + config_.alpha_sim * s.visual < config_.d_p()) {
      return std::nullopt;
    }
  }
  Node n;
  n.id = size();
  n.feature = p.feature;
  n.pose = p.pose;
  n.count = 1;
  n.semantic = p.semantic;
  n.capture_step = step;
  nodes_.push_back(std::move(n));
  adjacency_.emplace_back();
  current_ = nodes_.back().id;
  parked_ = true;
  ++version_;
  return current_;
}

int GraphMemory::localize(const Percept& p) {
  const Similarity s = similarity(p.feature, p.pose);
  if (s.combined < config_.d_locate()) {
    if (!parked_ || current_ != s.nearest) ++nodes_[s.nearest].count;
    current_ = s.nearest;
    parked_ = true;
  } else {
    parked_ = false;
  }
  return *current_;
}

void GraphMemory::begin_trajectory(const Percept& p) {
  pending_.clear();
  pending_overflow_ = false;
  pending_from_ = current_;
  last_seen_ = TrajectoryStep{p.pose, p.patch, Action::Up};
  parked_ = false;
}

std::optional<EdgeKey> GraphMemory::record_transition(Action action,
                                                      const Percept& p) {
  if (!last_seen_) {
    begin_trajectory(p);
    return std::nullopt;
  }
  TrajectoryStep taken = *last_seen_;
  taken.action = action;
  last_seen_ = TrajectoryStep{p.pose, p.patch, Action::Up};
  if (!pending_overflow_) {
    pending_.push_back(std::move(taken));
    if (static_cast<int>(pending_.size()) > config_.trajectory_cap) {
      pending_overflow_ = true;
      pending_.clear();
      pending_.shrink_to_fit();
    }
  }
  if (!current_) return std::nullopt;
  if (!pending_from_) {
    pending_from_ = current_;
    pending_.clear();
    pending_overflow_ = false;
    return std::nullopt;
  }
  if (*current_ == *pending_from_) return std::nullopt;

  std::optional<EdgeKey> touched;
  const int from = *pending_from_;
  const int to = *current_;
  if (!pending_overflow_ && !pending_.empty()) {
    const EdgeKey key{std::min(from, to), std::max(from, to)};
    auto it = edges_.find(key);
    if (it == edges_.end()) {
      Edge e;
      e.i = key.first;
      e.j = key.second;
      e.count = 1;
      e.steps = pending_;
      e.forward = from < to;
      edges_.emplace(key, std::move(e));
      connect(key.first, key.second);
    } else {
      Edge& e = it->second;
      ++e.count;
      if (pending_.size() < e.steps.size()) {
        e.steps = pending_;
        e.forward = from < to;
      }
    }
    touched = key;
  }
  pending_.clear();
  pending_overflow_ = false;
  pending_from_ = current_;
  return touched;
}

void GraphMemory::connect(int a, int b) {
  adjacency_[a].insert(b);
  adjacency_[b].insert(a);
  ++version_;
}

void GraphMemory::disconnect(int a, int b) {
  adjacency_[a].erase(b);
  adjacency_[b].erase(a);
  ++version_;
}

bool GraphMemory::connected_without(int a, int b, EdgeKey removed) const {
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<int> frontier;
  frontier.push(a);
  seen[a] = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    if (u == b) return true;
    for (int v : adjacency_[u]) {
      if (seen[v]) continue;
      if (EdgeKey{std::min(u, v), std::max(u, v)} == removed) continue;
      seen[v] = 1;
      frontier.push(v);
    }
  }
  return false;
}

std::vector<Edge> GraphMemory::prune_edges(std::int64_t min_count) {
  std::vector<EdgeKey> candidates;
  for (const auto& [key, e] : edges_) {
    if (e.count < min_count) candidates.push_back(key);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const EdgeKey& a, const EdgeKey& b) {
                     return edges_.at(a).count < edges_.at(b).count;
                   });
  std::vector<Edge> removed;
  for (const EdgeKey& key : candidates) {
    if (!connected_without(key.first, key.second, key)) continue;
    removed.push_back(edges_.at(key));
    edges_.erase(key);
    disconnect(key.first, key.second);
  }
  return removed;
}

std::vector<double> GraphMemory::goal_probabilities(double temperature) const {
  if (nodes_.empty()) throw NoNodesError();
  if (!(temperature > 0.0)) throw Error("goal temperature must be positive");
  std::int64_t lowest = nodes_.front().count;
  for (const Node& n : nodes_) lowest = std::min(lowest, n.count);
  std::vector<double> p(nodes_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    p[i] = std::exp(-temperature *
                    static_cast<double>(nodes_[i].count - lowest));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

int GraphMemory::sample_goal(double temperature, Rng& rng) const {
  const auto p = goal_probabilities(temperature);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

std::vector<int> GraphMemory::distances_from(int source) const {
  check_node(source);
  std::vector<int> dist(nodes_.size(), -1);
  std::queue<int> frontier;
  frontier.push(source);
  dist[source] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adjacency_[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

std::vector<int> GraphMemory::shortest_path(int from, int to) const {
  return shortest_path(from, to, {});
}

std::vector<int> GraphMemory::shortest_path(
    int from, int to, const std::set<std::pair<int, int>>& avoid) const {
  check_node(from);
  check_node(to);
  std::vector<int> parent(nodes_.size(), -1);
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<int> frontier;
  frontier.push(from);
  seen[from] = 1;
  while (!frontier.empty() && !seen[to]) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adjacency_[u]) {  // ascending id order
      if (!seen[v] && !avoid.count({std::min(u, v), std::max(u, v)})) {
        seen[v] = 1;
        parent[v] = u;
        frontier.push(v);
      }
    }
  }
  if (!seen[to]) return {};
  std::vector<int> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<int> GraphMemory::topo_distance(int from, int to) const {
  const auto path = shortest_path(from, to);
  if (path.empty()) return std::nullopt;
  return static_cast<int>(path.size()) - 1;
}

namespace {

json pose_json(const Pose& p) { return json::array({p.x, p.y, p.yaw}); }

}  // namespace

std::string GraphMemory::snapshot() const {
  json doc;
  doc["current"] = current_ ? json(*current_) : json(nullptr);
  json nodes = json::array();
  for (const Node& n : nodes_) {
    json feature = json::array();
    for (Eigen::Index k = 0; k < n.feature.size(); ++k) {
      feature.push_back(n.feature[k]);
    }
    nodes.push_back({{"id", n.id},
                     {"pose", pose_json(n.pose)},
                     {"count", n.count},
                     {"semantic", n.semantic},
                     {"step", n.capture_step},
                     {"feature", std::move(feature)}});
  }
  json edges = json::array();
  for (const auto& [key, e] : edges_) {
    json actions = json::array();
    json poses = json::array();
    json patches = json::array();
    for (const TrajectoryStep& s : e.steps) {
      actions.push_back(static_cast<int>(s.action));
      poses.push_back(pose_json(s.pose));
      patches.push_back(patch_to_string(s.patch));
    }
    edges.push_back({{"i", e.i},
                     {"j", e.j},
                     {"count", e.count},
                     {"direction", e.forward ? "i->j" : "j->i"},
                     {"actions", std::move(actions)},
                     {"poses", std::move(poses)},
                     {"patches", std::move(patches)}});
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return std::string(kGraphFormat) + "\n" + doc.dump(1) + "\n";
}

namespace {

Pose parse_pose(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("pose must have 3 entries");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void GraphMemory::restore(std::string_view text) {
  const std::size_t header_end = text.find('\n');
  if (header_end == std::string_view::npos ||
      text.substr(0, header_end) != kGraphFormat) {
    throw ParseError("missing '" + std::string(kGraphFormat) + "' header", 0);
  }
  const std::size_t body_offset = header_end + 1;
  json doc;
  try {
    doc = json::parse(text.substr(body_offset));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed graph snapshot: ") + e.what(),
                     body_offset + (e.byte > 0 ? e.byte - 1 : 0));
  }

  GraphMemory fresh(config_);
  try {
    for (const json& jn : doc.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<int>();
      if (n.id != fresh.size()) throw Error("node ids must be dense and ordered");
      n.pose = parse_pose(jn.at("pose"));
      n.count = jn.at("count").get<std::int64_t>();
      n.semantic = jn.at("semantic").get<double>();
      n.capture_step = jn.value("step", std::int64_t{0});
      const auto& jf = jn.at("feature");
      n.feature.resize(static_cast<Eigen::Index>(jf.size()));
      for (std::size_t k = 0; k < jf.size(); ++k) n.feature[k] = jf[k].get<double>();
      fresh.nodes_.push_back(std::move(n));
      fresh.adjacency_.emplace_back();
    }
    for (const json& je : doc.at("edges")) {
      Edge e;
      e.i = je.at("i").get<int>();
      e.j = je.at("j").get<int>();
      if (e.i >= e.j || e.i < 0 || e.j >= fresh.size()) {
        throw Error("edge endpoints invalid");
      }
      e.count = je.at("count").get<std::int64_t>();
      const std::string dir = je.at("direction").get<std::string>();
      if (dir != "i->j" && dir != "j->i") throw Error("bad edge direction");
      e.forward = dir == "i->j";
      const auto& ja = je.at("actions");
      const auto& jp = je.at("poses");
      const auto& jt = je.at("patches");
      if (ja.size() != jp.size() || ja.size() != jt.size() || ja.empty()) {
        throw Error("edge trajectory arrays disagree");
      }
      for (std::size_t k = 0; k < ja.size(); ++k) {
        const int a = ja[k].get<int>();
        if (a < 0 || a > static_cast<int>(Action::TurnRight)) {
          throw Error("bad action code");
        }
        e.steps.push_back({parse_pose(jp[k]),
                           patch_from_string(jt[k].get<std::string>()),
                           static_cast<Action>(a)});
      }
      const EdgeKey key{e.i, e.j};
      if (!fresh.edges_.emplace(key, std::move(e)).second) {
        throw Error("duplicate edge");
      }
      fresh.adjacency_[key.first].insert(key.second);
      fresh.adjacency_[key.second].insert(key.first);
    }
    const json& cur = doc.at("current");
    if (!cur.is_null()) {
      const int c = cur.get<int>();
      fresh.check_node(c);
      fresh.current_ = c;
    } else if (!fresh.nodes_.empty()) {
      throw Error("current node missing");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid graph snapshot: ") + e.what(),
                     body_offset);
  }
  fresh.version_ = version_ + 1;
  *this = std::move(fresh);
}

GraphMemory GraphMemory::from_snapshot(std::string_view text,
                                       GraphConfig config) {
  GraphMemory g(config);
  g.restore(text);
  return g;
}

bool GraphMemory::same_as(const GraphMemory& other, double tol) const {
  if (nodes_.size() != other.nodes_.size() || edges_ != other.edges_ ||
      current_ != other.current_) {
    return false;
  }
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& a = nodes_[k];
    const Node& b = other.nodes_[k];
    if (a.id != b.id || a.pose != b.pose || a.count != b.count ||
        a.semantic != b.semantic || a.capture_step != b.capture_step ||
        a.feature.size() != b.feature.size()) {
      return false;
    }
    if (a.feature.size() > 0 &&
        (a.feature - b.feature).cwiseAbs().maxCoeff() > tol) {
      return false;
    }
  }
  return true;
}

}  // namespace dgmem
