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

#ifndef DGMEM_NN_HPP_
#define DGMEM_NN_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dgmem/gridworld.hpp"

namespace dgmem::nn {

// Inputs and activations are column-batched: one sample per column.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

enum class Activation { Identity, Tanh, Relu };

class Mlp {
 public:
  Mlp() = default;
  // sizes = {inputs, hidden..., outputs}. Weights uniform in
  // +-gain/sqrt(fan_in), biases zero.
  Mlp(std::vector<int> sizes, Activation hidden, Activation output, Rng& rng,
      const std::string& prefix, double output_gain = 1.0);

  struct Tape {
    std::vector<Matrix> activations;  // activations[0] is the input
  };

  Matrix forward(const Matrix& x, Tape* tape = nullptr) const;
  // Accumulates parameter gradients; returns d loss / d input.
  Matrix backward(const Tape& tape, const Matrix& d_out);

  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }

 private:
  Activation activation_for(std::size_t layer) const;

  std::vector<int> sizes_;
  Activation hidden_ = Activation::Tanh;
  Activation output_ = Activation::Identity;
  std::vector<Parameter> params_;  // W0, b0, W1, b1, ...
};

// Column-wise log-softmax.
Matrix log_softmax(const Matrix& logits);
Matrix softmax(const Matrix& logits);

// Shared fusion trunk with a policy head and a value head.
class ActorCritic {
 public:
  ActorCritic() = default;
  ActorCritic(int inputs, const std::vector<int>& hidden, int actions,
              std::uint64_t seed);

  struct Tape {
    Mlp::Tape trunk;
    Mlp::Tape actor;
    Mlp::Tape critic;
  };
  struct Output {
    Matrix logits;       // actions x batch
    Eigen::RowVectorXd values;
  };

  Output forward(const Matrix& x, Tape* tape = nullptr) const;
  void backward(const Tape& tape, const Matrix& d_logits,
                const Eigen::RowVectorXd& d_values);

  int inputs() const { return trunk_.inputs(); }
  int actions() const { return actor_.outputs(); }
  const std::vector<int>& hidden() const { return hidden_; }

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  void zero_grad();
  bool finite() const;
  double squared_norm() const;

  bool operator==(const ActorCritic& other) const;

 private:
  std::vector<int> hidden_;
  Mlp trunk_;
  Mlp actor_;
  Mlp critic_;
};

// Adaptive-moment optimizer over a fixed parameter list.
class Adam {
 public:
  Adam() = default;
  explicit Adam(const std::vector<Parameter*>& params, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  void step(const std::vector<Parameter*>& params, double lr);
  std::int64_t steps() const { return t_; }
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  void set_steps(std::int64_t t) { t_ = t; }

 private:
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

// Plain gradient descent step.
void sgd_step(const std::vector<Parameter*>& params, double lr);

}  // namespace dgmem::nn

#endif  // DGMEM_NN_HPP_
