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

#ifndef DGMEM_CONFIG_HPP_
#define DGMEM_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dgmem/graph.hpp"
#include "dgmem/gridworld.hpp"
#include "dgmem/learner.hpp"
#include "dgmem/navigator.hpp"
#include "dgmem/reward.hpp"

namespace dgmem {

enum class AgentKind { Dgmem, Random, Straight, ForwardDynamics, Rnd };

AgentKind parse_agent_kind(std::string_view name);
const char* agent_kind_name(AgentKind kind);

struct MapConfig {
  std::string path;           // empty: generated FourRooms
  std::uint64_t seed = 0;
};

struct EncoderConfig {
  int dim = 128;
  std::uint64_t seed = 7;
  double confidence = 1.0;  // per-landmark detection confidence
};

struct ExploreConfig {
  double temperature = 0.5;  // goal sampler
  std::int64_t prune_interval = 10000;
  std::int64_t prune_min_count = 2;
};

struct TrainConfig {
  std::int64_t steps = 250000;
  int horizon = 100;             // goal-episode timeout
  std::uint64_t seed = 0;
  std::int64_t reset_interval = 0;  // 0: one infinite episode
  std::int64_t checkpoint_interval = 50000;
  int success_window = 100;      // goal-episodes in the rolling success rate
  std::uint64_t policy_seed = 1;  // weight init
};

struct EvalConfig {
  int episodes = 100;
  std::uint64_t seed = 1000;
};

struct BaselineConfig {
  int hidden = 64;
  double model_lr = 1e-3;
  double reward_scale = 1.0;
};

// Every tunable, addressable by flat dotted keys ("graph.d_c").
struct Config {
  AgentKind agent = AgentKind::Dgmem;
  MapConfig map;
  EnvConfig env;
  EncoderConfig encoder;
  GraphConfig graph;
  ExploreConfig explore;
  RewardConfig reward;
  LearnerConfig learner;
  TrainConfig train;
  NavConfig nav;
  EvalConfig eval;
  BaselineConfig baseline;

  // Throws ConfigError naming the offending key.
  static Config from_json(std::string_view text);
  static Config load(const std::filesystem::path& path);
  std::string to_json() const;
  void set(const std::string& key, const std::string& value);
  void validate() const;

  std::vector<std::string> keys() const;
  bool operator==(const Config& other) const { return to_json() == other.to_json(); }
};

GridMap load_map(const MapConfig& cfg);

// Navigator settings with the success radius and pose scaling the policy
// was trained with.
NavConfig nav_config(const Config& cfg);

}  // namespace dgmem

#endif  // DGMEM_CONFIG_HPP_
