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

#ifndef DGMEM_ENCODER_HPP_
#define DGMEM_ENCODER_HPP_

#include <Eigen/Dense>
#include <cstdint>

#include "dgmem/gridworld.hpp"

namespace dgmem {

// Unit-norm patch embedding.
using Feature = Eigen::VectorXd;

// Frozen random projection of one-hot tile patches. Immutable after
// construction, so one instance may be shared across threads.
class Encoder {
 public:
  Encoder(int patch_size, int feature_dim, std::uint64_t seed);

  // Throws DimensionError if the patch is not patch_size x patch_size.
  Feature encode(const Patch& patch) const;

  int patch_size() const { return patch_size_; }
  int feature_dim() const { return static_cast<int>(projection_.rows()); }
  std::uint64_t seed() const { return seed_; }

 private:
  int patch_size_;
  std::uint64_t seed_;
  Eigen::MatrixXd projection_;  // F x (k*k*kTileKinds)
};

// Sum of per-landmark detection confidences over the patch.
double semantic_score(const Patch& patch, double confidence = 1.0);

inline double cosine(const Feature& a, const Feature& b) { return a.dot(b); }

// Everything the memory needs to know about one observation.
struct Percept {
  Feature feature;
  Pose pose;
  double semantic = 0.0;
  Patch patch;
};

Percept perceive(const Encoder& encoder, const Observation& obs,
                 double confidence = 1.0);

}  // namespace dgmem

#endif  // DGMEM_ENCODER_HPP_
