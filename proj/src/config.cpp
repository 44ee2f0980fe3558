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

#include "dgmem/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "dgmem/error.hpp"

namespace dgmem {

using json = nlohmann::json;

AgentKind parse_agent_kind(std::string_view name) {
  if (name == "dgmem") return AgentKind::Dgmem;
  if (name == "random") return AgentKind::Random;
  if (name == "straight") return AgentKind::Straight;
  if (name == "dp") return AgentKind::ForwardDynamics;
  if (name == "rnd") return AgentKind::Rnd;
  throw ConfigError("agent", "unknown agent '" + std::string(name) + "'");
}

const char* agent_kind_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::Dgmem: return "dgmem";
    case AgentKind::Random: return "random";
    case AgentKind::Straight: return "straight";
    case AgentKind::ForwardDynamics: return "dp";
    case AgentKind::Rnd: return "rnd";
  }
  return "?";
}

namespace {

template <class E>
struct EnumNames;

template <>
struct EnumNames<AgentKind> {
  static std::string name(AgentKind v) { return agent_kind_name(v); }
  static AgentKind parse(const std::string& s) { return parse_agent_kind(s); }
};

template <>
struct EnumNames<ActionSet> {
  static std::string name(ActionSet v) {
    return v == ActionSet::Cardinal ? "cardinal" : "heading";
  }
  static ActionSet parse(const std::string& s) {
    if (s == "cardinal") return ActionSet::Cardinal;
    if (s == "heading") return ActionSet::Heading;
    throw Error("expected cardinal|heading");
  }
};

template <>
struct EnumNames<NoiseModel> {
  static std::string name(NoiseModel v) {
    return v == NoiseModel::Drift ? "drift" : "measurement";
  }
  static NoiseModel parse(const std::string& s) {
    if (s == "drift") return NoiseModel::Drift;
    if (s == "measurement") return NoiseModel::Measurement;
    throw Error("expected drift|measurement");
  }
};

template <>
struct EnumNames<GoalLocalization> {
  static std::string name(GoalLocalization v) {
    return v == GoalLocalization::Value ? "value" : "similarity";
  }
  static GoalLocalization parse(const std::string& s) {
    if (s == "value") return GoalLocalization::Value;
    if (s == "similarity") return GoalLocalization::Similarity;
    throw Error("expected value|similarity");
  }
};

template <class T>
json encode(const T& v) {
  if constexpr (std::is_enum_v<T>) {
    return EnumNames<T>::name(v);
  } else {
    return v;
  }
}

template <class T>
void decode(const json& j, T& v) {
  if constexpr (std::is_enum_v<T>) {
    v = EnumNames<T>::parse(j.get<std::string>());
  } else if constexpr (std::is_same_v<T, double>) {
    if (!j.is_number()) throw Error("expected a number");
    v = j.get<double>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) throw Error("expected true or false");
    v = j.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw Error("expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (j.is_number_unsigned()) {
        v = j.get<T>();
      } else if (j.get<std::int64_t>() < 0) {
        throw Error("expected a non-negative integer");
      } else {
        v = static_cast<T>(j.get<std::int64_t>());
      }
    } else {
      v = j.get<T>();
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) throw Error("expected a string");
    v = j.get<std::string>();
  } else {
    if (!j.is_array()) throw Error("expected an array");
    v = j.get<T>();
  }
}

// Binds every key to its member. Keep this the single list of keys.
template <class C, class F>
void for_each_field(C& c, F&& f) {
  f("agent", c.agent);
  f("map.path", c.map.path);
  f("map.seed", c.map.seed);
  f("env.actions", c.env.actions);
  f("env.patch", c.env.patch_size);
  f("env.noise", c.env.noise);
  f("env.noise_model", c.env.noise_model);
  f("encoder.dim", c.encoder.dim);
  f("encoder.seed", c.encoder.seed);
  f("encoder.confidence", c.encoder.confidence);
  f("graph.d_c", c.graph.d_c);
  f("graph.d_s", c.graph.d_s);
  f("graph.d_e", c.graph.d_e);
  f("graph.alpha_sim", c.graph.alpha_sim);
  f("graph.locate_ratio", c.graph.locate_ratio);
  f("graph.trajectory_cap", c.graph.trajectory_cap);
  f("graph.prune_interval", c.explore.prune_interval);
  f("graph.prune_min_count", c.explore.prune_min_count);
  f("explore.temperature", c.explore.temperature);
  f("reward.alpha", c.reward.alpha);
  f("reward.novelty", c.reward.novelty);
  f("reward.success", c.reward.success);
  f("reward.radius", c.reward.success_radius);
  f("learner.hidden", c.learner.hidden);
  f("learner.clip", c.learner.clip);
  f("learner.nsteps", c.learner.nsteps);
  f("learner.minibatches", c.learner.minibatches);
  f("learner.epochs", c.learner.epochs);
  f("learner.lr_start", c.learner.lr_start);
  f("learner.lr_end", c.learner.lr_end);
  f("learner.gamma", c.learner.gamma);
  f("learner.lambda", c.learner.lambda);
  f("learner.value_coef", c.learner.value_coef);
  f("learner.entropy_coef", c.learner.entropy_coef);
  f("learner.beta", c.learner.beta);
  f("learner.il_edges", c.learner.il_edges);
  f("learner.il_epochs", c.learner.il_epochs);
  f("learner.il_lr", c.learner.il_lr);
  f("learner.pose_scale", c.learner.pose_scale);
  f("train.steps", c.train.steps);
  f("train.horizon", c.train.horizon);
  f("train.seed", c.train.seed);
  f("train.policy_seed", c.train.policy_seed);
  f("train.reset_interval", c.train.reset_interval);
  f("train.checkpoint_interval", c.train.checkpoint_interval);
  f("train.success_window", c.train.success_window);
  f("nav.subgoal_budget", c.nav.subgoal_budget);
  f("nav.max_replans", c.nav.max_replans);
  f("nav.max_steps", c.nav.max_steps);
  f("nav.goal_localization", c.nav.goal_localization);
  f("nav.greedy", c.nav.greedy);
  f("nav.cycle_window", c.nav.cycle_window);
  f("nav.direct_endpoints", c.nav.direct_endpoints);
  f("eval.episodes", c.eval.episodes);
  f("eval.seed", c.eval.seed);
  f("baseline.hidden", c.baseline.hidden);
  f("baseline.model_lr", c.baseline.model_lr);
  f("baseline.reward_scale", c.baseline.reward_scale);
}

}  // namespace

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for_each_field(*this, [&](const char* key, const auto&) { out.push_back(key); });
  return out;
}

Config Config::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object", 0);
  Config cfg;
  std::set<std::string> known;
  for_each_field(cfg, [&](const char* key, auto& member) {
    known.insert(key);
    const auto it = doc.find(key);
    if (it == doc.end()) return;
    try {
      decode(*it, member);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(key, e.what());
    }
  });
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown key");
  }
  cfg.validate();
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string Config::to_json() const {
  json doc = json::object();
  for_each_field(*this, [&](const char* key, const auto& member) {
    doc[key] = encode(member);
  });
  return doc.dump(2) + "\n";
}

void Config::set(const std::string& key, const std::string& value) {
  json doc = json::parse(to_json());
  if (!doc.contains(key)) throw ConfigError(key, "unknown key");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // bare strings
  }
  doc[key] = parsed;
  *this = from_json(doc.dump());
}

void Config::validate() const {
  bool ok = true;
  std::string bad;
  for_each_field(*this, [&](const char* key, const auto& member) {
    using T = std::decay_t<decltype(member)>;
    if constexpr (std::is_same_v<T, double>) {
      if (ok && !std::isfinite(member)) {
        ok = false;
        bad = key;
      }
    }
  });
  if (!ok) throw ConfigError(bad, "must be finite");
  auto require = [](bool cond, const char* key, const char* what) {
    if (!cond) throw ConfigError(key, what);
  };
  require(env.patch_size > 0 && env.patch_size % 2 == 1, "env.patch", "must be odd and positive");
  require(env.noise >= 0.0, "env.noise", "must be non-negative");
  require(encoder.dim > 0, "encoder.dim", "must be positive");
  require(explore.temperature > 0.0, "explore.temperature", "must be positive");
  require(graph.trajectory_cap > 0, "graph.trajectory_cap", "must be positive");
  require(learner.nsteps > 0, "learner.nsteps", "must be positive");
  require(learner.epochs > 0, "learner.epochs", "must be positive");
  require(learner.minibatches > 0, "learner.minibatches", "must be positive");
  require(!learner.hidden.empty(), "learner.hidden", "needs at least one layer");
  for (int h : learner.hidden) require(h > 0, "learner.hidden", "sizes must be positive");
  require(learner.beta >= 0.0, "learner.beta", "must be non-negative");
  require(train.steps >= 0, "train.steps", "must be non-negative");
  require(train.horizon > 0, "train.horizon", "must be positive");
  require(train.reset_interval >= 0, "train.reset_interval", "must be non-negative");
  require(train.success_window > 0, "train.success_window", "must be positive");
  require(nav.subgoal_budget > 0, "nav.subgoal_budget", "must be positive");
  require(nav.max_replans >= 0, "nav.max_replans", "must be non-negative");
  require(nav.max_steps > 0, "nav.max_steps", "must be positive");
  require(nav.cycle_window >= 0, "nav.cycle_window", "must be non-negative");
  require(eval.episodes >= 0, "eval.episodes", "must be non-negative");
  require(baseline.hidden > 0, "baseline.hidden", "must be positive");
}

GridMap load_map(const MapConfig& cfg) {
  if (cfg.path.empty()) return make_four_rooms(cfg.seed);
  std::ifstream in(cfg.path);
  if (!in) throw ConfigError("map.path", "cannot open " + cfg.path);
  std::ostringstream ss;
  ss << in.rdbuf();
  GridMap map = GridMap::parse(ss.str());
  map.validate();
  return map;
}

NavConfig nav_config(const Config& cfg) {
  NavConfig nav = cfg.nav;
  nav.success_radius = cfg.reward.success_radius;
  nav.pose_scale = cfg.learner.pose_scale;
  return nav;
}

}  // namespace dgmem
