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

#include "dgmem/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "dgmem/error.hpp"
#include "dgmem/trainer.hpp"

namespace dgmem {

namespace {

std::vector<nn::Parameter*> pointers(nn::Mlp& net) {
  std::vector<nn::Parameter*> out;
  for (auto& p : net.params()) out.push_back(&p);
  return out;
}

void zero(nn::Mlp& net) {
  for (auto& p : net.params()) p.grad.setZero(p.value.rows(), p.value.cols());
}

}  // namespace

Action random_policy(ActionSet actions, Rng& rng) {
  const int n = action_count(actions);
  return action_from_index(actions,
                           std::uniform_int_distribution<int>(0, n - 1)(rng));
}

Action straight_policy(bool collision, std::optional<Action> last,
                       ActionSet actions, Rng& rng) {
  if (actions == ActionSet::Heading) {
    if (!collision) return Action::MoveAhead;
    return std::bernoulli_distribution(0.5)(rng) ? Action::TurnLeft
                                                 : Action::TurnRight;
  }
  if (!last) return random_policy(actions, rng);
  if (!collision) return *last;
  const int prev = action_index(*last);
  int k = std::uniform_int_distribution<int>(0, 2)(rng);
  if (k >= prev) ++k;
  return action_from_index(actions, k);
}

Action StraightAgent::act(const Observation&) {
  // A heading agent that just turned moves ahead next.
  const bool turned = last_ && (*last_ == Action::TurnLeft ||
                                *last_ == Action::TurnRight);
  const Action a =
      straight_policy(collision_ && !turned, last_, actions_, rng_);
  last_ = a;
  return a;
}

ForwardDynamicsModel::ForwardDynamicsModel(int feature_dim, int num_actions,
                                           int hidden, double lr,
                                           std::uint64_t seed)
    : num_actions_(num_actions), lr_(lr) {
  Rng rng(seed);
  net_ = nn::Mlp({feature_dim + num_actions, hidden, hidden, feature_dim},
                 nn::Activation::Tanh, nn::Activation::Identity, rng, "dp");
  optimizer_ = nn::Adam(pointers(net_));
}

nn::Vector ForwardDynamicsModel::input(const Feature& feature,
                                       int action) const {
  if (feature.size() + num_actions_ != net_.inputs()) {
    throw DimensionError("forward model feature size mismatch");
  }
  if (action < 0 || action >= num_actions_) {
    throw std::out_of_range("action index out of range");
  }
  nn::Vector x = nn::Vector::Zero(net_.inputs());
  x.head(feature.size()) = feature;
  x(feature.size() + action) = 1.0;
  return x;
}

double ForwardDynamicsModel::error(const Feature& feature, int action,
                                   const Feature& next) const {
  return (net_.forward(input(feature, action)) - next).squaredNorm();
}

double ForwardDynamicsModel::reward(const Feature& feature, int action,
                                    const Feature& next) {
  nn::Mlp::Tape tape;
  const nn::Matrix pred = net_.forward(input(feature, action), &tape);
  const nn::Matrix diff = pred - next;
  zero(net_);
  net_.backward(tape, 2.0 * diff);
  optimizer_.step(pointers(net_), lr_);
  return diff.squaredNorm();
}

bool ForwardDynamicsModel::finite() const {
  for (const auto& p : net_.params()) {
    if (!p.value.allFinite()) return false;
  }
  return true;
}

RndModel::RndModel(int feature_dim, int hidden, int outputs, double lr,
                   std::uint64_t seed)
    : lr_(lr) {
  Rng rng(seed);
  const std::vector<int> sizes{feature_dim, hidden, hidden, outputs};
  target_ = nn::Mlp(sizes, nn::Activation::Relu, nn::Activation::Identity,
                    rng, "rnd.target");
  predictor_ = nn::Mlp(sizes, nn::Activation::Relu, nn::Activation::Identity,
                       rng, "rnd.predictor");
  optimizer_ = nn::Adam(pointers(predictor_));
}

double RndModel::error(const Feature& next) const {
  return (predictor_.forward(next) - target_.forward(next)).squaredNorm();
}

double RndModel::reward(const Feature&, int, const Feature& next) {
  const nn::Matrix goal = target_.forward(next);
  nn::Mlp::Tape tape;
  const nn::Matrix diff = predictor_.forward(next, &tape) - goal;
  zero(predictor_);
  predictor_.backward(tape, 2.0 * diff);
  optimizer_.step(pointers(predictor_), lr_);
  return diff.squaredNorm();
}

bool RndModel::finite() const {
  for (const auto& p : predictor_.params()) {
    if (!p.value.allFinite()) return false;
  }
  return true;
}

void RndModel::copy_target_to_predictor() {
  auto& dst = predictor_.params();
  const auto& src = target_.params();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k].value = src[k].value;
  optimizer_ = nn::Adam(pointers(predictor_));
}

CuriosityAgent::CuriosityAgent(const Config& cfg, const Encoder& encoder,
                               int num_actions,
                               std::unique_ptr<IntrinsicModel> model)
    : cfg_(cfg),
      encoder_(encoder),
      actions_(cfg.env.actions),
      intrinsic_(std::move(model)),
      policy_(encoder.feature_dim() + 3,
              {cfg.baseline.hidden, cfg.baseline.hidden}, num_actions,
              cfg.train.policy_seed),
      optimizer_(policy_.parameters()),
      buffer_(cfg.learner.nsteps),
      rng_(cfg.train.seed * 0x9e3779b97f4a7c15ull + 29) {}

nn::Vector CuriosityAgent::input(const Percept& p) const {
  nn::Vector x(p.feature.size() + 3);
  const double s = cfg_.learner.pose_scale;
  x << p.feature, p.pose.x * s, p.pose.y * s, p.pose.yaw / M_PI;
  return x;
}

void CuriosityAgent::reset(const Observation& obs) {
  if (!buffer_.data().empty()) buffer_.data().back().done = true;
  pending_.reset();
  last_ = perceive(encoder_, obs, cfg_.encoder.confidence);
}

Action CuriosityAgent::act(const Observation& obs) {
  last_ = perceive(encoder_, obs, cfg_.encoder.confidence);
  Transition t;
  t.input = input(last_);
  const auto out = policy_.forward(t.input);
  const nn::Matrix logp = nn::log_softmax(out.logits);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  double acc = 0.0;
  t.action = static_cast<int>(logp.rows()) - 1;
  for (Eigen::Index a = 0; a < logp.rows(); ++a) {
    acc += std::exp(logp(a, 0));
    if (u < acc) {
      t.action = static_cast<int>(a);
      break;
    }
  }
  t.log_prob = logp(t.action, 0);
  t.value = out.values[0];
  const Action a = action_from_index(actions_, t.action);
  pending_ = std::move(t);
  return a;
}

void CuriosityAgent::feedback(Action, const Observation& next) {
  const Percept p = perceive(encoder_, next, cfg_.encoder.confidence);
  ++steps_;
  if (pending_) {
    last_reward_ = cfg_.baseline.reward_scale *
                   intrinsic_->reward(last_.feature, pending_->action,
                                      p.feature);
    pending_->reward = last_reward_;
    pending_->done = false;
    buffer_.push(std::move(*pending_));
    pending_.reset();
  }
  last_ = p;
  if (buffer_.full()) {
    buffer_.bootstrap_value = policy_.forward(input(p)).values[0];
    const double total =
        static_cast<double>(cfg_.train.steps) / cfg_.learner.nsteps;
    const double lr = linear_lr(static_cast<double>(updates_), total,
                                cfg_.learner.lr_start, cfg_.learner.lr_end);
    ppo_update(policy_, optimizer_, buffer_, cfg_.learner, lr, rng_);
    ++updates_;
    buffer_.clear();
  }
}

std::unique_ptr<Agent> make_baseline(const Config& cfg, const Encoder& encoder,
                                     int num_actions) {
  const std::uint64_t seed = cfg.train.seed * 0x9e3779b97f4a7c15ull + 41;
  switch (cfg.agent) {
    case AgentKind::Dgmem:
      return std::make_unique<DgmemAgent>(cfg, encoder, num_actions);
    case AgentKind::Random:
      return std::make_unique<RandomAgent>(cfg.env.actions, seed);
    case AgentKind::Straight:
      return std::make_unique<StraightAgent>(cfg.env.actions, seed);
    case AgentKind::ForwardDynamics:
      return std::make_unique<CuriosityAgent>(
          cfg, encoder, num_actions,
          std::make_unique<ForwardDynamicsModel>(
              encoder.feature_dim(), num_actions, cfg.baseline.hidden,
              cfg.baseline.model_lr, seed));
    case AgentKind::Rnd:
      return std::make_unique<CuriosityAgent>(
          cfg, encoder, num_actions,
          std::make_unique<RndModel>(encoder.feature_dim(),
                                     cfg.baseline.hidden, cfg.baseline.hidden,
                                     cfg.baseline.model_lr, seed));
  }
  throw ConfigError("agent", "unsupported agent");
}

}  // namespace dgmem
