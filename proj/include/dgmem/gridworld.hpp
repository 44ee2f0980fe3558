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

#ifndef DGMEM_GRIDWORLD_HPP_
#define DGMEM_GRIDWORLD_HPP_

#include <compare>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace dgmem {

using Rng = std::mt19937_64;

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

// Planar pose estimate in cell units; yaw in radians.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  bool operator==(const Pose&) const = default;
};

double planar_distance(const Pose& a, const Pose& b);

inline constexpr int kLandmarkIds = 10;
inline constexpr int kTileKinds = 2 + kLandmarkIds;

class Tile {
 public:
  constexpr Tile() = default;
  static constexpr Tile free_space() { return Tile(0); }
  static constexpr Tile wall() { return Tile(1); }
  static constexpr Tile landmark(int id) {
    return Tile(static_cast<std::uint8_t>(2 + id));
  }
  static Tile from_code(int code);

  constexpr bool is_wall() const { return code_ == 1; }
  constexpr bool is_landmark() const { return code_ >= 2; }
  constexpr int landmark_id() const { return code_ - 2; }
  // Index into the one-hot tile encoding, in [0, kTileKinds).
  constexpr int code() const { return code_; }

  char to_char() const;
  static Tile from_char(char c);

  constexpr bool operator==(const Tile&) const = default;

 private:
  constexpr explicit Tile(std::uint8_t code) : code_(code) {}
  std::uint8_t code_ = 0;
};

class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height);

  // `#` wall, `.` free, digits landmark ids. Throws ParseError.
  static GridMap parse(std::string_view text);
  std::string to_text() const;

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Cell c) const;
  Tile at(Cell c) const;  // out-of-bounds reads as wall
  void set(Cell c, Tile t);
  bool passable(Cell c) const { return !at(c).is_wall(); }

  int room(Cell c) const;
  void set_room(Cell c, int room);
  int room_count() const;

  std::vector<Cell> free_cells() const;
  int free_count() const;
  int landmark_count() const;

  // Boundary walls present and free space connected. Throws Error otherwise.
  void validate() const;

  bool operator==(const GridMap&) const = default;

 private:
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * width_ + c.x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Tile> tiles_;
  std::vector<int> rooms_;
};

// 21x17 bounded grid, cross-shaped interior walls, one doorway per wall
// segment; 256 non-wall cells. Doorway offsets and landmarks come from
// `seed`.
GridMap make_four_rooms(std::uint64_t seed);

enum class ActionSet { Cardinal, Heading };

enum class Action : std::uint8_t {
  Up,
  Down,
  Left,
  Right,
  MoveAhead,
  TurnLeft,
  TurnRight,
};

int action_count(ActionSet set);
Action action_from_index(ActionSet set, int index);
int action_index(Action a);
const char* action_name(Action a);

enum class NoiseModel {
  // Each step's reported delta carries independent Gaussian noise; the
  // error accumulates.
  Drift,
  // The reported pose is the true relative pose plus fresh Gaussian noise.
  Measurement,
};

struct AgentState {
  Cell position;
  int heading = 0;  // 0 north, 1 east, 2 south, 3 west
  Cell origin;      // odometry frame origin
  Pose odometry;    // accumulated noisy estimate (Drift model)
  std::int64_t steps = 0;

  Pose true_pose() const;  // exact pose relative to origin
  bool operator==(const AgentState&) const = default;
};

struct Patch {
  int size = 0;
  std::vector<Tile> tiles;  // row-major, size*size

  Tile at(int row, int col) const { return tiles[row * size + col]; }
  bool operator==(const Patch&) const = default;
};

std::string patch_to_string(const Patch& p);
Patch patch_from_string(std::string_view s);

struct Observation {
  Patch patch;
  Pose pose;
  bool collision = false;
};

struct EnvConfig {
  ActionSet actions = ActionSet::Cardinal;
  int patch_size = 5;
  double noise = 0.0;
  NoiseModel noise_model = NoiseModel::Measurement;
};

class GridWorld {
 public:
  GridWorld(GridMap map, EnvConfig config);

  const GridMap& map() const { return map_; }
  const EnvConfig& config() const { return config_; }
  int num_actions() const { return action_count(config_.actions); }

  // Uniform free cell; odometry frame origin at the spawn cell.
  AgentState spawn(Rng& rng) const;
  // Place the agent at `cell` with an existing frame origin.
  AgentState place(Cell cell, Cell origin, int heading = 0) const;

  struct StepResult {
    AgentState state;
    Observation obs;
  };
  StepResult step(const AgentState& state, Action action, Rng& rng) const;

  // Observation at the current state: the reported pose is noise-free for
  // the Drift model (odometry as accumulated) and freshly perturbed for
  // the Measurement model.
  Observation observe(const AgentState& state, Rng& rng,
                      bool collision = false) const;
  Patch patch_at(Cell c, int heading) const;

 private:
  GridMap map_;
  EnvConfig config_;
};

}  // namespace dgmem

#endif  // DGMEM_GRIDWORLD_HPP_
