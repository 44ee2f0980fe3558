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

#include "dgmem/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "dgmem/error.hpp"

namespace dgmem {

double planar_distance(const Pose& a, const Pose& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

Tile Tile::from_code(int code) {
  if (code < 0 || code >= kTileKinds) {
    throw Error("tile code out of range: " + std::to_string(code));
  }
  return Tile(static_cast<std::uint8_t>(code));
}

char Tile::to_char() const {
  if (is_wall()) return '#';
  if (is_landmark()) return static_cast<char>('0' + landmark_id());
  return '.';
}

Tile Tile::from_char(char c) {
  if (c == '#') return wall();
  if (c == '.') return free_space();
  if (c >= '0' && c <= '9') return landmark(c - '0');
  throw Error(std::string("unknown tile character '") + c + "'");
}

GridMap::GridMap(int width, int height)
    : width_(width),
      height_(height),
      tiles_(static_cast<std::size_t>(width) * height, Tile::free_space()),
      rooms_(static_cast<std::size_t>(width) * height, 0) {}

GridMap GridMap::parse(std::string_view text) {
  std::vector<std::string_view> rows;
  std::vector<std::size_t> row_offsets;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      rows.push_back(line);
      row_offsets.push_back(pos);
    }
    pos = end + 1;
  }
  if (rows.empty()) throw ParseError("empty map", 0);
  const int width = static_cast<int>(rows.front().size());
  GridMap map(width, static_cast<int>(rows.size()));
  for (std::size_t y = 0; y < rows.size(); ++y) {
    if (static_cast<int>(rows[y].size()) != width) {
      throw ParseError("ragged map row " + std::to_string(y), row_offsets[y]);
    }
    for (int x = 0; x < width; ++x) {
      try {
        map.set({x, static_cast<int>(y)}, Tile::from_char(rows[y][x]));
      } catch (const Error& e) {
        throw ParseError(e.what(), row_offsets[y] + x);
      }
    }
  }
  return map;
}

std::string GridMap::to_text() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(width_ + 1) * height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) out.push_back(at({x, y}).to_char());
    out.push_back('\n');
  }
  return out;
}

bool GridMap::in_bounds(Cell c) const {
  return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
}

Tile GridMap::at(Cell c) const {
  return in_bounds(c) ? tiles_[index(c)] : Tile::wall();
}

void GridMap::set(Cell c, Tile t) { tiles_.at(index(c)) = t; }

int GridMap::room(Cell c) const {
  return in_bounds(c) && passable(c) ? rooms_[index(c)] : -1;
}

void GridMap::set_room(Cell c, int room) { rooms_.at(index(c)) = room; }

int GridMap::room_count() const {
  int best = -1;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) best = std::max(best, room({x, y}));
  }
  return best + 1;
}

std::vector<Cell> GridMap::free_cells() const {
  std::vector<Cell> cells;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (passable({x, y})) cells.push_back({x, y});
    }
  }
  return cells;
}

int GridMap::free_count() const {
  return static_cast<int>(free_cells().size());
}

int GridMap::landmark_count() const {
  return static_cast<int>(std::count_if(
      tiles_.begin(), tiles_.end(), [](Tile t) { return t.is_landmark(); }));
}

void GridMap::validate() const {
  for (int x = 0; x < width_; ++x) {
    if (passable({x, 0}) || passable({x, height_ - 1})) {
      throw Error("map boundary must be wall");
    }
  }
  for (int y = 0; y < height_; ++y) {
    if (passable({0, y}) || passable({width_ - 1, y})) {
      throw Error("map boundary must be wall");
    }
  }
  const auto cells = free_cells();
  if (cells.empty()) throw Error("map has no free cells");
  std::vector<char> seen(tiles_.size(), 0);
  std::queue<Cell> frontier;
  frontier.push(cells.front());
  seen[index(cells.front())] = 1;
  std::size_t reached = 1;
  constexpr int kDx[] = {0, 0, -1, 1};
  constexpr int kDy[] = {-1, 1, 0, 0};
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop();
    for (int k = 0; k < 4; ++k) {
      const Cell n{c.x + kDx[k], c.y + kDy[k]};
      if (passable(n) && !seen[index(n)]) {
        seen[index(n)] = 1;
        ++reached;
        frontier.push(n);
      }
    }
  }
  if (reached != cells.size()) throw Error("map free space is disconnected");
}

namespace {

constexpr int kRoomsWidth = 21;
constexpr int kRoomsHeight = 17;
constexpr int kWallX = 10;
constexpr int kWallY = 8;

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

GridMap make_four_rooms(std::uint64_t seed) {
  Rng rng(seed);
  GridMap map(kRoomsWidth, kRoomsHeight);
  for (int y = 0; y < kRoomsHeight; ++y) {
    for (int x = 0; x < kRoomsWidth; ++x) {
      const bool boundary =
          x == 0 || y == 0 || x == kRoomsWidth - 1 || y == kRoomsHeight - 1;
      const bool cross = x == kWallX || y == kWallY;
      if (boundary || cross) map.set({x, y}, Tile::wall());
      map.set_room({x, y}, (x > kWallX ? 1 : 0) + (y > kWallY ? 2 : 0));
    }
  }

  const Cell door_top{kWallX, uniform_int(rng, 2, kWallY - 2)};
  const Cell door_bottom{kWallX, uniform_int(rng, kWallY + 2, kRoomsHeight - 3)};
  const Cell door_left{uniform_int(rng, 2, kWallX - 2), kWallY};
  const Cell door_right{uniform_int(rng, kWallX + 2, kRoomsWidth - 3), kWallY};
  for (Cell d : {door_top, door_bottom, door_left, door_right}) {
    map.set(d, Tile::free_space());
  }
  map.set_room(door_top, 0);
  map.set_room(door_bottom, 2);
  map.set_room(door_left, 0);
  map.set_room(door_right, 1);

  auto place = [&](Cell c) {
    if (map.at(c) == Tile::free_space()) {
      map.set(c, Tile::landmark(uniform_int(rng, 0, kLandmarkIds - 1)));
    }
  };
  // A landmark on each side of every doorway.
  place({door_top.x - 1, door_top.y});
  place({door_top.x + 1, door_top.y});
  place({door_bottom.x - 1, door_bottom.y});
  place({door_bottom.x + 1, door_bottom.y});
  place({door_left.x, door_left.y - 1});
  place({door_left.x, door_left.y + 1});
  place({door_right.x, door_right.y - 1});
  place({door_right.x, door_right.y + 1});

  // One close pair near the middle of each room.
  for (int room = 0; room < 4; ++room) {
    const int x0 = room % 2 == 0 ? 1 : kWallX + 1;
    const int y0 = room < 2 ? 1 : kWallY + 1;
    const Cell a{x0 + uniform_int(rng, 3, 5), y0 + uniform_int(rng, 2, 4)};
    const Cell b{a.x - x0 < 5 ? a.x + 4 : a.x - 4, a.y};
    place(a);
    place(b);
  }
  return map;
}

int action_count(ActionSet set) { return set == ActionSet::Cardinal ? 4 : 3; }

Action action_from_index(ActionSet set, int index) {
  if (index < 0 || index >= action_count(set)) {
    throw Error("action index out of range: " + std::to_string(index));
  }
  return static_cast<Action>(index + (set == ActionSet::Cardinal ? 0 : 4));
}

int action_index(Action a) {
  const int raw = static_cast<int>(a);
  return raw >= 4 ? raw - 4 : raw;
}

const char* action_name(Action a) {
  switch (a) {
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::MoveAhead: return "move_ahead";
    case Action::TurnLeft: return "turn_left";
    case Action::TurnRight: return "turn_right";
  }
  return "?";
}

Pose AgentState::true_pose() const {
  return {static_cast<double>(position.x - origin.x),
          static_cast<double>(position.y - origin.y),
          heading * std::numbers::pi / 2.0};
}

std::string patch_to_string(const Patch& p) {
  std::string s;
  s.reserve(p.tiles.size());
  for (Tile t : p.tiles) s.push_back(t.to_char());
  return s;
}

Patch patch_from_string(std::string_view s) {
  const int size = static_cast<int>(std::lround(std::sqrt(s.size())));
  if (size * size != static_cast<int>(s.size())) {
    throw Error("patch string is not square");
  }
  Patch p{size, {}};
  p.tiles.reserve(s.size());
  for (char c : s) p.tiles.push_back(Tile::from_char(c));
  return p;
}

GridWorld::GridWorld(GridMap map, EnvConfig config)
    : map_(std::move(map)), config_(config) {
  if (config_.patch_size <= 0 || config_.patch_size % 2 == 0) {
    throw Error("patch size must be odd and positive");
  }
  map_.validate();
}

AgentState GridWorld::spawn(Rng& rng) const {
  const auto cells = map_.free_cells();
  const Cell c = cells[std::uniform_int_distribution<std::size_t>(
      0, cells.size() - 1)(rng)];
  return place(c, c, 0);
}

AgentState GridWorld::place(Cell cell, Cell origin, int heading) const {
  AgentState s;
  s.position = cell;
  s.origin = origin;
  s.heading = heading;
  s.odometry = s.true_pose();
  return s;
}

namespace {

constexpr int kHeadingDx[] = {0, 1, 0, -1};
constexpr int kHeadingDy[] = {-1, 0, 1, 0};

}  // namespace

GridWorld::StepResult GridWorld::step(const AgentState& state, Action action,
                                      Rng& rng) const {
  AgentState next = state;
  int dx = 0;
  int dy = 0;
  int turn = 0;
  switch (action) {
    case Action::Up: dy = -1; break;
    case Action::Down: dy = 1; break;
    case Action::Left: dx = -1; break;
    case Action::Right: dx = 1; break;
    case Action::MoveAhead:
      dx = kHeadingDx[state.heading];
      dy = kHeadingDy[state.heading];
      break;
    case Action::TurnLeft: turn = -1; break;
    case Action::TurnRight: turn = 1; break;
  }
  bool collision = false;
  if (dx != 0 || dy != 0) {
    const Cell target{state.position.x + dx, state.position.y + dy};
    if (map_.passable(target)) {
      next.position = target;
    } else {
      collision = true;
    }
  }
  next.heading = (state.heading + turn + 4) % 4;
  ++next.steps;

  const Pose before = state.true_pose();
  const Pose after = next.true_pose();
  double ddx = after.x - before.x;
  double ddy = after.y - before.y;
  double dyaw = turn * std::numbers::pi / 2.0;
  if (config_.noise_model == NoiseModel::Drift && config_.noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, config_.noise);
    ddx += gauss(rng);
    ddy += gauss(rng);
    dyaw += gauss(rng);
  }
  next.odometry = {state.odometry.x + ddx, state.odometry.y + ddy,
                   state.odometry.yaw + dyaw};
  if (config_.noise_model == NoiseModel::Measurement) next.odometry = after;
  return {next, observe(next, rng, collision)};
}

Observation GridWorld::observe(const AgentState& state, Rng& rng,
                               bool collision) const {
  Observation obs;
  obs.patch = patch_at(state.position,
                       config_.actions == ActionSet::Heading ? state.heading : 0);
  obs.pose = state.odometry;
  if (config_.noise_model == NoiseModel::Measurement && config_.noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, config_.noise);
    obs.pose.x += gauss(rng);
    obs.pose.y += gauss(rng);
    obs.pose.yaw += gauss(rng);
  }
  obs.collision = collision;
  return obs;
}

Patch GridWorld::patch_at(Cell c, int heading) const {
  const int k = config_.patch_size;
  const int half = k / 2;
  Patch p{k, std::vector<Tile>(static_cast<std::size_t>(k) * k)};
  for (int row = 0; row < k; ++row) {
    for (int col = 0; col < k; ++col) {
      // Egocentric: rotate so the agent's heading points up the patch.
      const int u = col - half;  // right
      const int v = row - half;  // back
      int wx = u;
      int wy = v;
      switch (heading) {
        case 1: wx = -v; wy = u; break;
        case 2: wx = -u; wy = -v; break;
        case 3: wx = v; wy = -u; break;
        default: break;
      }
      p.tiles[row * k + col] = map_.at({c.x + wx, c.y + wy});
    }
  }
  return p;
}

}  // namespace dgmem
