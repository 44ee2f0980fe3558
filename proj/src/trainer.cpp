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

#include "dgmem/trainer.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dgmem/error.hpp"

namespace dgmem {

using json = nlohmann::json;

DgmemAgent::DgmemAgent(const Config& cfg, const Encoder& encoder,
                       int num_actions)
    : cfg_(cfg),
      encoder_(encoder),
      actions_(cfg.env.actions),
      graph_(cfg.graph),
      model_(policy_input_dim(encoder.feature_dim()), cfg.learner.hidden,
             num_actions, cfg.train.policy_seed),
      best_model_(model_),
      optimizer_(model_.parameters()),
      buffer_(cfg.learner.nsteps),
      rng_(cfg.train.seed * 0x9e3779b97f4a7c15ull + 17) {}

double DgmemAgent::rolling_success() const {
  if (recent_.empty()) return 0.0;
  int hits = 0;
  for (bool s : recent_) hits += s;
  return static_cast<double>(hits) / static_cast<double>(recent_.size());
}

void DgmemAgent::reset(const Observation& obs) {
  // A teleport cuts the running episode.
  if (!buffer_.data().empty()) buffer_.data().back().done = true;
  pending_.reset();
  last_percept_ = perceive(encoder_, obs, cfg_.encoder.confidence);
  if (!graph_.empty()) graph_.localize(last_percept_);
  graph_.try_add_node(last_percept_, steps_);
  graph_.begin_trajectory(last_percept_);
  start_goal_episode();
}

void DgmemAgent::start_goal_episode() {
  goal_steps_ = 0;
  novelty_.reset();
  if (graph_.empty()) {
    goal_.reset();
    return;
  }
  int g = graph_.sample_goal(cfg_.explore.temperature, rng_);
  for (int tries = 0; tries < 10; ++tries) {
    if (planar_distance(graph_.node(g).pose, last_percept_.pose) >=
        cfg_.reward.success_radius) {
      break;
    }
    g = graph_.sample_goal(cfg_.explore.temperature, rng_);
  }
  goal_ = g;
  if (auto cur = graph_.current()) novelty_.reward(*cur, 0.0);
}

Action DgmemAgent::act(const Observation& obs) {
  last_percept_ = perceive(encoder_, obs, cfg_.encoder.confidence);
  if (!goal_) {
    pending_.reset();
    const int n = action_count(actions_);
    return action_from_index(
        actions_, std::uniform_int_distribution<int>(0, n - 1)(rng_));
  }
  const Node& g = graph_.node(*goal_);
  Transition t;
  t.input = policy_input(last_percept_.feature, g.feature,
                         relative_pose(last_percept_.pose, g.pose),
                         cfg_.learner.pose_scale);
  const auto out = model_.forward(t.input);
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

void DgmemAgent::feedback(Action action, const Observation& next) {
  const std::optional<int> prev = graph_.current();
  last_percept_ = perceive(encoder_, next, cfg_.encoder.confidence);
  if (!graph_.empty()) graph_.localize(last_percept_);
  graph_.try_add_node(last_percept_, steps_);
  graph_.record_transition(action, last_percept_);
  ++steps_;

  if (pending_ && goal_ && prev) {
    const int cur = *graph_.current();
    const RewardBreakdown r = step_reward(graph_, *prev, cur, *goal_,
                                          last_percept_.pose, novelty_,
                                          cfg_.reward);
    ++goal_steps_;
    const bool done = r.done || goal_steps_ >= cfg_.train.horizon;
    pending_->reward = r.total;
    pending_->done = done;
    buffer_.push(std::move(*pending_));
    pending_.reset();
    if (on_step) {
      on_step({steps_, r, *goal_, cur, graph_.size(),
               static_cast<int>(graph_.edges().size())});
    }
    if (done) {
      on_goal_end(r.done);
      start_goal_episode();
    }
  } else if (!goal_ && !graph_.empty()) {
    start_goal_episode();
  }

  if (buffer_.full()) {
    buffer_.bootstrap_value = 0.0;
    if (goal_) {
      const Node& g = graph_.node(*goal_);
      buffer_.bootstrap_value =
          model_
              .forward(policy_input(last_percept_.feature, g.feature,
                                    relative_pose(last_percept_.pose, g.pose),
                                    cfg_.learner.pose_scale))
              .values[0];
    }
    update();
    buffer_.clear();
  }
  if (cfg_.explore.prune_interval > 0 &&
      steps_ % cfg_.explore.prune_interval == 0) {
    const auto removed = graph_.prune_edges(cfg_.explore.prune_min_count);
    if (!removed.empty()) {
      spdlog::debug("step {}: pruned {} edges", steps_, removed.size());
    }
  }
}

void DgmemAgent::on_goal_end(bool success) {
  ++goal_episodes_;
  successes_ += success;
  recent_.push_back(success);
  while (static_cast<int>(recent_.size()) > cfg_.train.success_window) {
    recent_.pop_front();
  }
}

std::vector<Demonstration> DgmemAgent::sample_demonstrations() {
  std::vector<Demonstration> demos;
  const auto& edges = graph_.edges();
  if (edges.empty() || cfg_.learner.il_edges <= 0) return demos;
  std::vector<const Edge*> all;
  all.reserve(edges.size());
  for (const auto& [key, e] : edges) all.push_back(&e);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  for (int k = 0; k < cfg_.learner.il_edges; ++k) {
    const Edge& e = *all[pick(rng_)];
    const Node& target = graph_.node(e.target());
    for (const TrajectoryStep& s : e.steps) {
      demos.push_back({policy_input(encoder_.encode(s.patch), target.feature,
                                    relative_pose(s.pose, target.pose),
                                    cfg_.learner.pose_scale),
                       action_index(s.action)});
    }
  }
  return demos;
}

void DgmemAgent::update() {
  const double total_updates =
      static_cast<double>(cfg_.train.steps) / cfg_.learner.nsteps;
  UpdateLogRecord rec;
  rec.step = steps_;
  rec.lr = linear_lr(static_cast<double>(updates_), total_updates,
                     cfg_.learner.lr_start, cfg_.learner.lr_end);
  rec.ppo = ppo_update(model_, optimizer_, buffer_, cfg_.learner, rec.lr, rng_);
  rec.il = il_update(model_, sample_demonstrations(), cfg_.learner.beta,
                     cfg_.learner.il_lr, cfg_.learner.il_epochs);
  ++updates_;
  rec.rolling_success = rolling_success();
  rec.nodes = graph_.size();
  rec.edges = static_cast<int>(graph_.edges().size());
  if (static_cast<int>(recent_.size()) >= cfg_.train.success_window &&
      rec.rolling_success >= best_success_) {
    best_success_ = rec.rolling_success;
    best_model_ = model_;
  }
  if (on_update) on_update(rec);
}

namespace {

std::string rng_state(const Rng& rng) {
  std::ostringstream ss;
  ss << rng;
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void DgmemAgent::save_state(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  save_checkpoint(model_, dir / "policy.ckpt");
  save_checkpoint(best_model_, dir / "best.ckpt");
  std::vector<std::pair<std::string, nn::Matrix>> moments;
  auto& opt = const_cast<nn::Adam&>(optimizer_);
  for (std::size_t k = 0; k < opt.first_moments().size(); ++k) {
    moments.emplace_back("m." + std::to_string(k), opt.first_moments()[k]);
    moments.emplace_back("v." + std::to_string(k), opt.second_moments()[k]);
  }
  save_tensors(dir / "optimizer.ckpt", moments);
  write_text(dir / "graph.txt", graph_.snapshot());
  json state{{"steps", steps_},
             {"updates", updates_},
             {"optimizer_steps", optimizer_.steps()},
             {"goal_episodes", goal_episodes_},
             {"successes", successes_},
             {"best_success", best_success_},
             {"recent", std::vector<bool>(recent_.begin(), recent_.end())},
             {"rng", rng_state(rng_)}};
  write_text(dir / "trainer.json", state.dump(1));
}

void DgmemAgent::load_state(const std::filesystem::path& dir) {
  model_ = load_checkpoint(dir / "policy.ckpt");
  best_model_ = load_checkpoint(dir / "best.ckpt");
  optimizer_ = nn::Adam(model_.parameters());
  const auto moments = load_tensors(dir / "optimizer.ckpt");
  if (moments.size() != 2 * optimizer_.first_moments().size()) {
    throw Error("optimizer state does not match the policy");
  }
  for (std::size_t k = 0; k < optimizer_.first_moments().size(); ++k) {
    optimizer_.first_moments()[k] = moments[2 * k].second;
    optimizer_.second_moments()[k] = moments[2 * k + 1].second;
  }
  graph_.restore(read_text(dir / "graph.txt"));
  const json state = json::parse(read_text(dir / "trainer.json"));
  steps_ = state.at("steps").get<std::int64_t>();
  updates_ = state.at("updates").get<std::int64_t>();
  optimizer_.set_steps(state.at("optimizer_steps").get<std::int64_t>());
  goal_episodes_ = state.at("goal_episodes").get<std::int64_t>();
  successes_ = state.at("successes").get<std::int64_t>();
  best_success_ = state.at("best_success").get<double>();
  recent_.clear();
  for (bool b : state.at("recent")) recent_.push_back(b);
  std::istringstream rs(state.at("rng").get<std::string>());
  rs >> rng_;
  buffer_.clear();
  pending_.reset();
  goal_.reset();
}

}  // namespace dgmem
