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

#ifndef DGMEM_LEARNER_HPP_
#define DGMEM_LEARNER_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dgmem/encoder.hpp"
#include "dgmem/nn.hpp"

namespace dgmem {

struct LearnerConfig {
  std::vector<int> hidden{512, 256};
  double clip = 0.1;
  int nsteps = 256;
  int minibatches = 1;
  int epochs = 4;
  double lr_start = 1e-4;
  double lr_end = 1e-5;
  double gamma = 0.99;
  double lambda = 0.95;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double beta = 0.1;        // KL weight of the imitation phase
  int il_edges = 16;        // edges sampled per imitation phase
  int il_epochs = 1;
  double il_lr = 0.05;
  double pose_scale = 1.0;  // relative pose is fed to the network scaled
};

// Learning rate after `step` of `total` updates, linear from start to end.
double linear_lr(double step, double total, double start, double end);

// Goal pose expressed relative to `from`; yaw wrapped to (-pi, pi].
Pose relative_pose(const Pose& from, const Pose& to);

// [obs feature; goal feature; scaled relative pose].
nn::Vector policy_input(const Feature& obs, const Feature& goal,
                        const Pose& relative, double pose_scale);
int policy_input_dim(int feature_dim);

struct Transition {
  nn::Vector input;
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  bool done = false;  // episode ended after this transition
};

class RolloutBuffer {
 public:
  explicit RolloutBuffer(int capacity = 256) : capacity_(capacity) {}

  void push(Transition t) { data_.push_back(std::move(t)); }
  bool full() const { return static_cast<int>(data_.size()) >= capacity_; }
  void clear() { data_.clear(); }
  int size() const { return static_cast<int>(data_.size()); }
  int capacity() const { return capacity_; }
  const std::vector<Transition>& data() const { return data_; }
  std::vector<Transition>& data() { return data_; }

  // Value of the state following the last transition.
  double bootstrap_value = 0.0;

 private:
  int capacity_;
  std::vector<Transition> data_;
};

struct Advantages {
  nn::Vector raw;
  nn::Vector returns;     // raw + value
  nn::Vector normalized;  // zero mean, unit variance
};

// Generalized advantage estimation with episode-boundary masking.
Advantages compute_advantages(const RolloutBuffer& buffer, double gamma,
                              double lambda);

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  bool aborted = false;
};

PpoStats ppo_update(nn::ActorCritic& model, nn::Adam& optimizer,
                    const RolloutBuffer& buffer, const LearnerConfig& cfg,
                    double lr, Rng& rng);

struct Demonstration {
  nn::Vector input;
  int action = 0;
};

struct IlStats {
  double cross_entropy = 0.0;
  double kl = 0.0;
  int samples = 0;
};

// Cross-entropy on demonstrated actions plus beta * KL(pi_old || pi), with
// pi_old frozen when the call starts. Gradient steps are scaled by
// 1 / (1 + beta), the curvature growth of the regularized objective.
IlStats il_update(nn::ActorCritic& model,
                  const std::vector<Demonstration>& batch, double beta,
                  double lr, int epochs = 1);

// Cross-entropy and KL(old || current) of a batch, no update.
IlStats il_objective(const nn::ActorCritic& model,
                     const std::vector<Demonstration>& batch,
                     const nn::Matrix& old_log_probs);

// Versioned binary checkpoint: header, shape manifest, little-endian f64.
void save_checkpoint(const nn::ActorCritic& model,
                     const std::filesystem::path& path);
nn::ActorCritic load_checkpoint(const std::filesystem::path& path);
std::string checkpoint_bytes(const nn::ActorCritic& model);
nn::ActorCritic checkpoint_from_bytes(const std::string& bytes);

// Same layout for a named list of matrices (optimizer moments).
void save_tensors(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, nn::Matrix>>& t);
std::vector<std::pair<std::string, nn::Matrix>> load_tensors(
    const std::filesystem::path& path);

inline constexpr std::string_view kCheckpointFormat = "dgmem-ckpt-v1";

}  // namespace dgmem

#endif  // DGMEM_LEARNER_HPP_
