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

#ifndef DGMEM_TRAINER_HPP_
#define DGMEM_TRAINER_HPP_

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>

#include "dgmem/agent.hpp"
#include "dgmem/config.hpp"
#include "dgmem/encoder.hpp"
#include "dgmem/graph.hpp"
#include "dgmem/learner.hpp"
#include "dgmem/reward.hpp"

namespace dgmem {

struct TrainLogRecord {
  std::int64_t step = 0;
  RewardBreakdown reward;
  int goal = -1;
  int node = -1;
  int nodes = 0;
  int edges = 0;
};

struct UpdateLogRecord {
  std::int64_t step = 0;
  double lr = 0.0;
  PpoStats ppo;
  IlStats il;
  double rolling_success = 0.0;
  int nodes = 0;
  int edges = 0;
};

// Self-supervised goal-conditioned learner: builds the graph memory from
// its own experience, samples goals from it, derives rewards and imitation
// data from it, and trains the actor-critic with PPO plus an imitation
// phase.
class DgmemAgent : public Agent {
 public:
  DgmemAgent(const Config& cfg, const Encoder& encoder, int num_actions);

  void reset(const Observation& obs) override;
  Action act(const Observation& obs) override;
  void feedback(Action action, const Observation& next) override;

  const nn::ActorCritic& policy() const { return model_; }
  // Parameters with the best rolling goal success rate seen so far.
  const nn::ActorCritic& best_policy() const { return best_model_; }
  double best_success() const { return best_success_; }
  double rolling_success() const;
  const GraphMemory& graph() const { return graph_; }
  std::int64_t steps() const { return steps_; }
  std::int64_t updates() const { return updates_; }
  std::int64_t goal_episodes() const { return goal_episodes_; }
  std::int64_t successes() const { return successes_; }

  std::function<void(const TrainLogRecord&)> on_step;
  std::function<void(const UpdateLogRecord&)> on_update;

  // Resume support: parameters, optimizer moments, counters, graph.
  void save_state(const std::filesystem::path& dir) const;
  void load_state(const std::filesystem::path& dir);

 private:
  void start_goal_episode();
  void on_goal_end(bool success);
  void update();
  std::vector<Demonstration> sample_demonstrations();

  Config cfg_;
  const Encoder& encoder_;
  ActionSet actions_;
  GraphMemory graph_;
  nn::ActorCritic model_;
  nn::ActorCritic best_model_;
  nn::Adam optimizer_;
  RolloutBuffer buffer_;
  Rng rng_;

  std::optional<int> goal_;
  int goal_steps_ = 0;
  NoveltyTracker novelty_;
  std::optional<Transition> pending_;
  Percept last_percept_;

  std::deque<bool> recent_;
  double best_success_ = -1.0;
  std::int64_t steps_ = 0;
  std::int64_t updates_ = 0;
  std::int64_t goal_episodes_ = 0;
  std::int64_t successes_ = 0;
};

}  // namespace dgmem

#endif  // DGMEM_TRAINER_HPP_
