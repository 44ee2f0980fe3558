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

#include "dgmem/agent.hpp"

namespace dgmem {

Harness::Harness(const GridWorld& env, std::uint64_t seed,
                 std::int64_t reset_interval)
    : env_(env), rng_(seed), reset_interval_(reset_interval) {}

AgentState Harness::home_for(const GridWorld& env, std::uint64_t seed) {
  Rng rng(seed);
  return env.spawn(rng);
}

void Harness::respawn(Agent& agent, const StepObserver& observer) {
  if (!started_) {
    home_ = env_.spawn(rng_);
    started_ = true;
  }
  state_ = home_;
  obs_ = env_.observe(state_, rng_);
  agent.reset(obs_);
  if (observer) observer({steps_, state_.position, Action::Up, &obs_, true});
}

void Harness::run(Agent& agent, std::int64_t steps,
                  const StepObserver& observer) {
  if (!started_) respawn(agent, observer);
  for (std::int64_t k = 0; k < steps; ++k) {
    if (reset_interval_ > 0 && steps_ > 0 && steps_ % reset_interval_ == 0) {
      respawn(agent, observer);
    }
    const Action a = agent.act(obs_);
    auto next = env_.step(state_, a, rng_);
    state_ = next.state;
    obs_ = std::move(next.obs);
    ++steps_;
    agent.feedback(a, obs_);
    if (observer) observer({steps_, state_.position, a, &obs_, false});
  }
}

}  // namespace dgmem
