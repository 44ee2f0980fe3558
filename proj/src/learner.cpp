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

#include "dgmem/learner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "dgmem/error.hpp"

namespace dgmem {

using nn::Matrix;
using nn::Vector;

double linear_lr(double step, double total, double start, double end) {
  if (total <= 0.0) return start;
  const double frac = std::clamp(step / total, 0.0, 1.0);
  return start + (end - start) * frac;
}

Pose relative_pose(const Pose& from, const Pose& to) {
  double yaw = std::remainder(to.yaw - from.yaw, 2.0 * std::numbers::pi);
  if (yaw <= -std::numbers::pi) yaw += 2.0 * std::numbers::pi;
  return {to.x - from.x, to.y - from.y, yaw};
}

int policy_input_dim(int feature_dim) { return 2 * feature_dim + 3; }

Vector policy_input(const Feature& obs, const Feature& goal,
                    const Pose& relative, double pose_scale) {
  if (obs.size() != goal.size()) {
    throw DimensionError("observation and goal features differ in size");
  }
  Vector x(policy_input_dim(static_cast<int>(obs.size())));
  x << obs, goal, relative.x * pose_scale, relative.y * pose_scale,
      relative.yaw / std::numbers::pi;
  return x;
}

Advantages compute_advantages(const RolloutBuffer& buffer, double gamma,
                              double lambda) {
  const auto& d = buffer.data();
  const Eigen::Index n = static_cast<Eigen::Index>(d.size());
  Advantages out;
  out.raw = Vector::Zero(n);
  double next_value = buffer.bootstrap_value;
  double running = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double mask = d[t].done ? 0.0 : 1.0;
    const double delta = d[t].reward + gamma * next_value * mask - d[t].value;
    running = delta + gamma * lambda * mask * running;
    out.raw[t] = running;
    next_value = d[t].value;
  }
  out.returns = out.raw;
  for (Eigen::Index t = 0; t < n; ++t) out.returns[t] += d[t].value;
  out.normalized = out.raw;
  if (n > 0) {
    const double mean = out.raw.mean();
    const double var = (out.raw.array() - mean).square().mean();
    out.normalized = (out.raw.array() - mean) / (std::sqrt(var) + 1e-8);
  }
  return out;
}

namespace {

struct Snapshot {
  std::vector<Matrix> values;
};

Snapshot save_params(nn::ActorCritic& model) {
  Snapshot s;
  for (nn::Parameter* p : model.parameters()) s.values.push_back(p->value);
  return s;
}

void restore_params(nn::ActorCritic& model, const Snapshot& s) {
  auto params = model.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = s.values[k];
}

}  // namespace

PpoStats ppo_update(nn::ActorCritic& model, nn::Adam& optimizer,
                    const RolloutBuffer& buffer, const LearnerConfig& cfg,
                    double lr, Rng& rng) {
  PpoStats stats;
  const auto& data = buffer.data();
  const int n = static_cast<int>(data.size());
  if (n == 0) return stats;
  const Advantages adv = compute_advantages(buffer, cfg.gamma, cfg.lambda);
  const Snapshot before = save_params(model);
  auto params = model.parameters();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int minibatches = std::max(1, std::min(cfg.minibatches, n));
  int updates = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (minibatches > 1) std::shuffle(order.begin(), order.end(), rng);
    for (int mb = 0; mb < minibatches; ++mb) {
      const int lo = mb * n / minibatches;
      const int hi = (mb + 1) * n / minibatches;
      const int b = hi - lo;
      Matrix x(model.inputs(), b);
      for (int k = 0; k < b; ++k) x.col(k) = data[order[lo + k]].input;

      nn::ActorCritic::Tape tape;
      const auto out = model.forward(x, &tape);
      const Matrix logp = nn::log_softmax(out.logits);
      const Matrix prob = logp.array().exp();
      Matrix d_logits = Matrix::Zero(out.logits.rows(), b);
      Eigen::RowVectorXd d_values(b);
      double policy_loss = 0.0, value_loss = 0.0, entropy = 0.0;
      double kl = 0.0, clipped = 0.0;
      for (int k = 0; k < b; ++k) {
        const Transition& t = data[order[lo + k]];
        const double a = adv.normalized[order[lo + k]];
        const double ratio = std::exp(logp(t.action, k) - t.log_prob);
        const double clipped_ratio =
            std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
        const double unclipped_obj = ratio * a;
        const double clipped_obj = clipped_ratio * a;
        policy_loss -= std::min(unclipped_obj, clipped_obj);
        if (unclipped_obj <= clipped_obj) {
          // d(ratio * a)/d logits = a * ratio * (onehot - pi)
          d_logits.col(k) -= (a * ratio / b) * -prob.col(k);
          d_logits(t.action, k) -= a * ratio / b;
        }
        if (std::abs(ratio - 1.0) > cfg.clip) clipped += 1.0;
        kl += t.log_prob - logp(t.action, k);

        const double h = -(prob.col(k).array() * logp.col(k).array()).sum();
        entropy += h;
        d_logits.col(k).array() += cfg.entropy_coef / b * prob.col(k).array() *
                                   (logp.col(k).array() + h);

        const double err = out.values[k] - adv.returns[order[lo + k]];
        value_loss += err * err;
        d_values[k] = cfg.value_coef * 2.0 * err / b;
      }
      policy_loss /= b;
      value_loss /= b;
      entropy /= b;
      const double loss = policy_loss + cfg.value_coef * value_loss -
                          cfg.entropy_coef * entropy;
      if (!std::isfinite(loss)) {
        restore_params(model, before);
        stats.aborted = true;
        spdlog::warn("ppo: non-finite loss, update rolled back");
        return stats;
      }
      model.zero_grad();
      model.backward(tape, d_logits, d_values);
      optimizer.step(params, lr);
      if (!model.finite()) {
        restore_params(model, before);
        stats.aborted = true;
        spdlog::warn("ppo: non-finite weights, update rolled back");
        return stats;
      }
      stats.policy_loss += policy_loss;
      stats.value_loss += value_loss;
      stats.entropy += entropy;
      stats.approx_kl += kl / b;
      stats.clip_fraction += clipped / b;
      ++updates;
    }
  }
  if (updates > 0) {
    stats.policy_loss /= updates;
    stats.value_loss /= updates;
    stats.entropy /= updates;
    stats.approx_kl /= updates;
    stats.clip_fraction /= updates;
  }
  return stats;
}

namespace {

Matrix stack_inputs(const nn::ActorCritic& model,
                    const std::vector<Demonstration>& batch) {
  Matrix x(model.inputs(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (batch[k].input.size() != model.inputs()) {
      throw DimensionError("demonstration input has wrong size");
    }
    x.col(static_cast<Eigen::Index>(k)) = batch[k].input;
  }
  return x;
}

}  // namespace

IlStats il_objective(const nn::ActorCritic& model,
                     const std::vector<Demonstration>& batch,
                     const Matrix& old_log_probs) {
  IlStats s;
  s.samples = static_cast<int>(batch.size());
  if (batch.empty()) return s;
  const Matrix logp = nn::log_softmax(model.forward(stack_inputs(model, batch)).logits);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    s.cross_entropy -= logp(batch[k].action, c);
    s.kl += (old_log_probs.col(c).array().exp() *
             (old_log_probs.col(c).array() - logp.col(c).array()))
                .sum();
  }
  s.cross_entropy /= s.samples;
  s.kl /= s.samples;
  return s;
}

IlStats il_update(nn::ActorCritic& model,
                  const std::vector<Demonstration>& batch, double beta,
                  double lr, int epochs) {
  if (batch.empty()) return {};
  const Matrix x = stack_inputs(model, batch);
  const Matrix old_logp = nn::log_softmax(model.forward(x).logits);
  const Matrix old_prob = old_logp.array().exp();
  const IlStats before = il_objective(model, batch, old_logp);
  const Snapshot saved = save_params(model);
  auto params = model.parameters();
  const double b = static_cast<double>(batch.size());
  const Eigen::RowVectorXd no_value = Eigen::RowVectorXd::Zero(x.cols());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    nn::ActorCritic::Tape tape;
    const auto out = model.forward(x, &tape);
    const Matrix prob = nn::softmax(out.logits);
    Matrix d_logits = prob + beta * (prob - old_prob);
    for (std::size_t k = 0; k < batch.size(); ++k) {
      d_logits(batch[k].action, static_cast<Eigen::Index>(k)) -= 1.0;
    }
    d_logits /= b;
    model.zero_grad();
    model.backward(tape, d_logits, no_value);
    nn::sgd_step(params, lr / (1.0 + beta));
    if (!model.finite()) {
      restore_params(model, saved);
      spdlog::warn("il: non-finite weights, update rolled back");
      break;
    }
  }
  return before;
}

namespace {

void put_f64(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

double get_f64(const std::string& in, std::size_t pos) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) {
    bits = (bits << 8) | static_cast<unsigned char>(in[pos + k]);
  }
  return std::bit_cast<double>(bits);
}

struct Tensors {
  std::vector<std::string> header_fields;
  std::vector<std::pair<std::string, Matrix>> tensors;
};

std::string encode_tensors(std::string_view format, const std::string& arch,
                           const std::vector<std::pair<std::string, const Matrix*>>& t) {
  std::ostringstream head;
  head << format << "\n" << arch << "\n" << "tensors " << t.size() << "\n";
  for (const auto& [name, m] : t) {
    head << name << " " << m->rows() << " " << m->cols() << "\n";
  }
  head << "data\n";
  std::string out = head.str();
  for (const auto& [name, m] : t) {
    for (Eigen::Index k = 0; k < m->size(); ++k) put_f64(out, m->data()[k]);
  }
  return out;
}

Tensors decode_tensors(std::string_view format, const std::string& bytes) {
  std::size_t pos = 0;
  auto line = [&]() {
    const std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) throw ParseError("truncated header", pos);
    std::string s = bytes.substr(pos, end - pos);
    pos = end + 1;
    return s;
  };
  const std::string magic = line();
  if (magic != format) {
    throw VersionError("expected '" + std::string(format) + "', found '" +
                       magic.substr(0, 32) + "'");
  }
  Tensors t;
  {
    std::istringstream arch(line());
    std::string field;
    while (arch >> field) t.header_fields.push_back(field);
  }
  std::size_t count = 0;
  {
    const std::size_t at = pos;
    std::istringstream s(line());
    std::string word;
    if (!(s >> word >> count) || word != "tensors") {
      throw ParseError("expected tensor count", at);
    }
  }
  std::vector<std::tuple<std::string, Eigen::Index, Eigen::Index>> manifest;
  std::size_t total = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t at = pos;
    std::istringstream s(line());
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(s >> name >> rows >> cols) || rows < 0 || cols < 0) {
      throw ParseError("bad manifest entry", at);
    }
    manifest.emplace_back(name, rows, cols);
    total += static_cast<std::size_t>(rows * cols);
  }
  if (line() != "data") throw ParseError("expected data marker", pos);
  if (bytes.size() - pos != total * 8) {
    throw ParseError("payload is " + std::to_string(bytes.size() - pos) +
                         " bytes, manifest needs " + std::to_string(total * 8),
                     pos);
  }
  for (const auto& [name, rows, cols] : manifest) {
    Matrix m(rows, cols);
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      m.data()[k] = get_f64(bytes, pos);
      pos += 8;
    }
    t.tensors.emplace_back(name, std::move(m));
  }
  return t;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so an interrupted write never clobbers the old file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string checkpoint_bytes(const nn::ActorCritic& model) {
  std::ostringstream arch;
  arch << "arch " << model.inputs() << " " << model.actions();
  for (int h : model.hidden()) arch << " " << h;
  std::vector<std::pair<std::string, const Matrix*>> t;
  for (const nn::Parameter* p : model.parameters()) t.emplace_back(p->name, &p->value);
  return encode_tensors(kCheckpointFormat, arch.str(), t);
}

nn::ActorCritic checkpoint_from_bytes(const std::string& bytes) {
  const Tensors t = decode_tensors(kCheckpointFormat, bytes);
  const auto& f = t.header_fields;
  if (f.size() < 4 || f[0] != "arch") throw ParseError("bad arch line", 0);
  const int inputs = std::stoi(f[1]);
  const int actions = std::stoi(f[2]);
  std::vector<int> hidden;
  for (std::size_t k = 3; k < f.size(); ++k) hidden.push_back(std::stoi(f[k]));
  nn::ActorCritic model(inputs, hidden, actions, 0);
  auto params = model.parameters();
  if (params.size() != t.tensors.size()) {
    throw ParseError("tensor count does not match architecture", 0);
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& [name, m] = t.tensors[k];
    if (name != params[k]->name || m.rows() != params[k]->value.rows() ||
        m.cols() != params[k]->value.cols()) {
      throw ParseError("tensor '" + name + "' does not match architecture", 0);
    }
    params[k]->value = m;
  }
  return model;
}

void save_checkpoint(const nn::ActorCritic& model,
                     const std::filesystem::path& path) {
  write_file_atomic(path, checkpoint_bytes(model));
}

nn::ActorCritic load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_bytes(read_file(path));
}

void save_tensors(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, Matrix>>& t) {
  std::vector<std::pair<std::string, const Matrix*>> refs;
  for (const auto& [name, m] : t) refs.emplace_back(name, &m);
  write_file_atomic(path, encode_tensors(kCheckpointFormat, "tensors-only", refs));
}

std::vector<std::pair<std::string, Matrix>> load_tensors(
    const std::filesystem::path& path) {
  return decode_tensors(kCheckpointFormat, read_file(path)).tensors;
}

}  // namespace dgmem
