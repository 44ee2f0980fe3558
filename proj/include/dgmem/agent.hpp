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

#ifndef DGMEM_AGENT_HPP_
#define DGMEM_AGENT_HPP_

#include <cstdint>
#include <functional>

#include "dgmem/gridworld.hpp"

namespace dgmem {

// Episode interface shared by the DGMem learner and the exploration
// baselines.
class Agent {
 public:
  virtual ~Agent() = default;
  // The agent has just been spawned or teleported.
  virtual void reset(const Observation& obs) = 0;
  virtual Action act(const Observation& obs) = 0;
  virtual void feedback(Action action, const Observation& next) = 0;
};

struct StepRecord {
  std::int64_t step = 0;
  Cell cell;
  Action action = Action::Up;
  const Observation* obs = nullptr;
  bool reset = false;  // `cell` is a (re)spawn
};

using StepObserver = std::function<void(const StepRecord&)>;

// Drives an agent in one environment instance. With reset_interval > 0
// the agent returns to its first spawn cell every reset_interval steps.
class Harness {
 public:
  Harness(const GridWorld& env, std::uint64_t seed,
          std::int64_t reset_interval = 0);

  void run(Agent& agent, std::int64_t steps, const StepObserver& observer = {});

  // The first spawn cell a harness with this seed uses.
  static AgentState home_for(const GridWorld& env, std::uint64_t seed);

  const AgentState& state() const { return state_; }
  std::int64_t steps() const { return steps_; }
  const GridWorld& env() const { return env_; }

 private:
  void respawn(Agent& agent, const StepObserver& observer);

  const GridWorld& env_;
  Rng rng_;
  std::int64_t reset_interval_;
  AgentState state_;
  AgentState home_;
  Observation obs_;
  std::int64_t steps_ = 0;
  bool started_ = false;
};

}  // namespace dgmem

#endif  // DGMEM_AGENT_HPP_
