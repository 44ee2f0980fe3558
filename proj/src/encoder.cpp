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

#include "dgmem/encoder.hpp"

#include <random>

#include "dgmem/error.hpp"

namespace dgmem {

Encoder::Encoder(int patch_size, int feature_dim, std::uint64_t seed)
    : patch_size_(patch_size), seed_(seed) {
  if (patch_size <= 0 || feature_dim <= 0) {
    throw DimensionError("encoder dimensions must be positive");
  }
  const int inputs = patch_size * patch_size * kTileKinds;
  projection_.resize(feature_dim, inputs);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int c = 0; c < inputs; ++c) {
    for (int r = 0; r < feature_dim; ++r) projection_(r, c) = gauss(rng);
  }
}

Feature Encoder::encode(const Patch& patch) const {
  const std::size_t cells = static_cast<std::size_t>(patch_size_) * patch_size_;
  if (patch.size != patch_size_ || patch.tiles.size() != cells) {
    throw DimensionError("patch must be " + std::to_string(patch_size_) + "x" +
                         std::to_string(patch_size_));
  }
  // The one-hot input has exactly one set entry per cell.
  Feature f = Feature::Zero(projection_.rows());
  for (std::size_t i = 0; i < cells; ++i) {
    f += projection_.col(static_cast<Eigen::Index>(i * kTileKinds +
                                                   patch.tiles[i].code()));
  }
  return f / f.norm();
}

double semantic_score(const Patch& patch, double confidence) {
  double score = 0.0;
  for (Tile t : patch.tiles) {
    if (t.is_landmark()) score += confidence;
  }
  return score;
}

Percept perceive(const Encoder& encoder, const Observation& obs,
                 double confidence) {
  return {encoder.encode(obs.patch), obs.pose,
          semantic_score(obs.patch, confidence), obs.patch};
}

}  // namespace dgmem
