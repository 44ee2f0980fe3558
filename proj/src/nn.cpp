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

#include "dgmem/nn.hpp"

#include <cmath>

#include "dgmem/error.hpp"

namespace dgmem::nn {

Mlp::Mlp(std::vector<int> sizes, Activation hidden, Activation output,
         Rng& rng, const std::string& prefix, double output_gain)
    : sizes_(std::move(sizes)), hidden_(hidden), output_(output) {
  if (sizes_.size() < 2) throw DimensionError("mlp needs at least two sizes");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l];
    const int fan_out = sizes_[l + 1];
    const double gain = l + 2 == sizes_.size() ? output_gain : 1.0;
    const double bound = gain / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    Parameter w{prefix + "." + std::to_string(l) + ".weight",
                Matrix(fan_out, fan_in), Matrix::Zero(fan_out, fan_in)};
    for (int c = 0; c < fan_in; ++c) {
      for (int r = 0; r < fan_out; ++r) w.value(r, c) = uniform(rng);
    }
    Parameter b{prefix + "." + std::to_string(l) + ".bias",
                Matrix::Zero(fan_out, 1), Matrix::Zero(fan_out, 1)};
    params_.push_back(std::move(w));
    params_.push_back(std::move(b));
  }
}

Activation Mlp::activation_for(std::size_t layer) const {
  return layer + 2 == sizes_.size() ? output_ : hidden_;
}

namespace {

void apply(Activation a, Matrix& z) {
  switch (a) {
    case Activation::Tanh: z = z.array().tanh(); break;
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Identity: break;
  }
}

// d/dz given the activation output.
void scale_by_derivative(Activation a, const Matrix& out, Matrix& grad) {
  switch (a) {
    case Activation::Tanh:
      grad.array() *= 1.0 - out.array().square();
      break;
    case Activation::Relu:
      grad.array() *= (out.array() > 0.0).cast<double>();
      break;
    case Activation::Identity: break;
  }
}

}  // namespace

Matrix Mlp::forward(const Matrix& x, Tape* tape) const {
  if (x.rows() != inputs()) {
    throw DimensionError("mlp expects " + std::to_string(inputs()) +
                         " inputs, got " + std::to_string(x.rows()));
  }
  if (tape) {
    tape->activations.clear();
    tape->activations.push_back(x);
  }
  Matrix a = x;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    Matrix z = params_[2 * l].value * a;
    z.colwise() += params_[2 * l + 1].value.col(0);
    apply(activation_for(l), z);
    a = std::move(z);
    if (tape) tape->activations.push_back(a);
  }
  return a;
}

Matrix Mlp::backward(const Tape& tape, const Matrix& d_out) {
  Matrix grad = d_out;
  for (std::size_t l = sizes_.size() - 1; l-- > 0;) {
    scale_by_derivative(activation_for(l), tape.activations[l + 1], grad);
    params_[2 * l].grad.noalias() += grad * tape.activations[l].transpose();
    params_[2 * l + 1].grad += grad.rowwise().sum();
    grad = params_[2 * l].value.transpose() * grad;
  }
  return grad;
}

Matrix log_softmax(const Matrix& logits) {
  Matrix out = logits;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double m = out.col(c).maxCoeff();
    const double lse = m + std::log((out.col(c).array() - m).exp().sum());
    out.col(c).array() -= lse;
  }
  return out;
}

Matrix softmax(const Matrix& logits) {
  return log_softmax(logits).array().exp();
}

ActorCritic::ActorCritic(int inputs, const std::vector<int>& hidden,
                         int actions, std::uint64_t seed)
    : hidden_(hidden) {
  if (hidden.empty()) throw DimensionError("actor-critic needs a hidden layer");
  Rng rng(seed);
  std::vector<int> trunk_sizes{inputs};
  trunk_sizes.insert(trunk_sizes.end(), hidden.begin(), hidden.end());
  trunk_ = Mlp(trunk_sizes, Activation::Tanh, Activation::Tanh, rng, "fusion");
  // Small policy head so the initial policy is close to uniform.
  actor_ = Mlp({hidden.back(), actions}, Activation::Identity,
               Activation::Identity, rng, "actor", 0.01);
  critic_ = Mlp({hidden.back(), 1}, Activation::Identity, Activation::Identity,
                rng, "critic");
}

ActorCritic::Output ActorCritic::forward(const Matrix& x, Tape* tape) const {
  const Matrix h = trunk_.forward(x, tape ? &tape->trunk : nullptr);
  Output out;
  out.logits = actor_.forward(h, tape ? &tape->actor : nullptr);
  out.values = critic_.forward(h, tape ? &tape->critic : nullptr).row(0);
  return out;
}

void ActorCritic::backward(const Tape& tape, const Matrix& d_logits,
                           const Eigen::RowVectorXd& d_values) {
  Matrix dh = actor_.backward(tape.actor, d_logits);
  dh += critic_.backward(tape.critic, Matrix(d_values));
  trunk_.backward(tape.trunk, dh);
}

std::vector<Parameter*> ActorCritic::parameters() {
  std::vector<Parameter*> out;
  for (Mlp* m : {&trunk_, &actor_, &critic_}) {
    for (Parameter& p : m->params()) out.push_back(&p);
  }
  return out;
}

std::vector<const Parameter*> ActorCritic::parameters() const {
  std::vector<const Parameter*> out;
  for (const Mlp* m : {&trunk_, &actor_, &critic_}) {
    for (const Parameter& p : m->params()) out.push_back(&p);
  }
  return out;
}

void ActorCritic::zero_grad() {
  for (Parameter* p : parameters()) p->grad.setZero();
}

bool ActorCritic::finite() const {
  for (const Parameter* p : parameters()) {
    if (!p->value.allFinite()) return false;
  }
  return true;
}

double ActorCritic::squared_norm() const {
  double total = 0.0;
  for (const Parameter* p : parameters()) total += p->value.squaredNorm();
  return total;
}

bool ActorCritic::operator==(const ActorCritic& other) const {
  const auto a = parameters();
  const auto b = other.parameters();
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k]->value.rows() != b[k]->value.rows() ||
        a[k]->value.cols() != b[k]->value.cols() ||
        a[k]->value != b[k]->value) {
      return false;
    }
  }
  return true;
}

Adam::Adam(const std::vector<Parameter*>& params, double beta1, double beta2,
           double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const Parameter* p : params) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::step(const std::vector<Parameter*>& params, double lr) {
  if (params.size() != m_.size()) {
    throw DimensionError("optimizer built for a different parameter list");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Matrix& g = params[k]->grad;
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * g;
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * g.cwiseProduct(g);
    params[k]->value.array() -=
        lr * (m_[k].array() / c1) / ((v_[k].array() / c2).sqrt() + eps_);
  }
}

void sgd_step(const std::vector<Parameter*>& params, double lr) {
  for (Parameter* p : params) p->value -= lr * p->grad;
}

}  // namespace dgmem::nn
