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

#ifndef DGMEM_BASELINES_HPP_
#define DGMEM_BASELINES_HPP_

#include <cstdint>
#include <memory>
#include <optional>

#include "dgmem/agent.hpp"
#include "dgmem/config.hpp"
#include "dgmem/encoder.hpp"
#include "dgmem/learner.hpp"
#include "dgmem/nn.hpp"

namespace dgmem {

Action random_policy(ActionSet actions, Rng& rng);

// Cardinal moves keep `last` until a collision, then switch to a uniformly
// drawn different direction. Heading moves go ahead and turn at random on
// collision.
Action straight_policy(bool collision, std::optional<Action> last,
                       ActionSet actions, Rng& rng);

class RandomAgent : public Agent {
 public:
  RandomAgent(ActionSet actions, std::uint64_t seed)
      : actions_(actions), rng_(seed) {}
  void reset(const Observation&) override {}
  Action act(const Observation&) override {
    return random_policy(actions_, rng_);
  }
  void feedback(Action, const Observation&) override {}

 private:
  ActionSet actions_;
  Rng rng_;
};

class StraightAgent : public Agent {
 public:
  StraightAgent(ActionSet actions, std::uint64_t seed)
      : actions_(actions), rng_(seed) {}
  void reset(const Observation&) override {
    last_.reset();
    collision_ = false;
  }
  Action act(const Observation&) override;
  void feedback(Action, const Observation& next) override {
    collision_ = next.collision;
  }

 private:
  ActionSet actions_;
  Rng rng_;
  std::optional<Action> last_;
  bool collision_ = false;
};

// Online curiosity signal. reward() scores a transition and then trains on
// it.
class IntrinsicModel {
 public:
  virtual ~IntrinsicModel() = default;
  virtual double reward(const Feature& feature, int action,
                        const Feature& next) = 0;
  virtual bool finite() const = 0;
};

// Forward dynamics model: predicts the next feature from (feature, action).
class ForwardDynamicsModel : public IntrinsicModel {
 public:
  ForwardDynamicsModel(int feature_dim, int num_actions, int hidden,
                       double lr, std::uint64_t seed);
  double reward(const Feature& feature, int action,
                const Feature& next) override;
  // Squared prediction error without training.
  double error(const Feature& feature, int action, const Feature& next) const;
  bool finite() const override;

 private:
  nn::Vector input(const Feature& feature, int action) const;

  int num_actions_;
  double lr_;
  nn::Mlp net_;
  nn::Adam optimizer_;
};

// Random network distillation: a learned predictor regresses a frozen
// random target on the next feature.
class RndModel : public IntrinsicModel {
 public:
  RndModel(int feature_dim, int hidden, int outputs, double lr,
           std::uint64_t seed);
  double reward(const Feature& feature, int action,
                const Feature& next) override;
  double error(const Feature& next) const;
  bool finite() const override;

  const nn::Mlp& target() const { return target_; }
  const nn::Mlp& predictor() const { return predictor_; }
  void copy_target_to_predictor();

 private:
  double lr_;
  nn::Mlp target_;
  nn::Mlp predictor_;
  nn::Adam optimizer_;
};

// PPO agent rewarded by an intrinsic model instead of graph rewards.
class CuriosityAgent : public Agent {
 public:
  CuriosityAgent(const Config& cfg, const Encoder& encoder, int num_actions,
                 std::unique_ptr<IntrinsicModel> model);

  void reset(const Observation& obs) override;
  Action act(const Observation& obs) override;
  void feedback(Action action, const Observation& next) override;

  const IntrinsicModel& intrinsic() const { return *intrinsic_; }
  std::int64_t steps() const { return steps_; }
  double last_reward() const { return last_reward_; }

 private:
  nn::Vector input(const Percept& p) const;

  Config cfg_;
  const Encoder& encoder_;
  ActionSet actions_;
  std::unique_ptr<IntrinsicModel> intrinsic_;
  nn::ActorCritic policy_;
  nn::Adam optimizer_;
  RolloutBuffer buffer_;
  Rng rng_;
  Percept last_;
  std::optional<Transition> pending_;
  std::int64_t steps_ = 0;
  std::int64_t updates_ = 0;
  double last_reward_ = 0.0;
};

// Builds any agent selected by cfg.agent.
std::unique_ptr<Agent> make_baseline(const Config& cfg, const Encoder& encoder,
                                     int num_actions);

}  // namespace dgmem

#endif  // DGMEM_BASELINES_HPP_
