// Copyright 2026 The LVLM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lvlm/model/config.hpp"
#include "lvlm/model/layers.hpp"
#include "lvlm/model/params.hpp"
#include "lvlm/vision/image.hpp"

namespace lvlm {

/// Grid coordinates (row, col) of every patch in sequence order.
///
/// Patches are listed window by window: each square merge window of
/// side sqrt(m) occupies m consecutive slots, so the merger's consecutive
/// groups are spatially compact. Falls back to raster order when m is not
/// a square that tiles the grid.
std::vector<std::pair<std::size_t, std::size_t>> patch_order(const ModelConfig& cfg);

/// Patch-based transformer encoder plus the patch merger that feeds the
/// language model. Encoder weights belong to the encoder partition, the
/// merger's linear map to the projector partition.
template <typename T>
class VisionEncoder {
 public:
  VisionEncoder(const ModelConfig& cfg, ParamStore<T>& store, Rng rng);

  /// Flattened pixel blocks [P, C·p²] in `patch_order`.
  BasicTensor<T> patchify(const ImageGrid& img) const;

  /// Linear patch map plus learned position table: [P, d_embed]. This is
  /// where a feedback delta is injected.
  BasicTensor<T> embed_patches(const ImageGrid& img) const;

  /// Runs the encoder blocks over `pe` (+ `delta` when given) followed by
  /// the final norm. A null delta and a zero delta give identical bits.
  BasicTensor<T> encode(const BasicTensor<T>& pe, const BasicTensor<T>* delta = nullptr) const;

  /// Concatenates consecutive groups of m features and projects them:
  /// [P, d_embed] → [P/m, d_llm].
  BasicTensor<T> merge_patches(const BasicTensor<T>& features) const;

  const ModelConfig& config() const { return cfg_; }

  BasicTensor<T> patch_weight, patch_bias, positions;
  std::vector<BlockParams<T>> blocks;
  BasicTensor<T> final_gain, final_bias;
  BasicTensor<T> merger_weight, merger_bias;

 private:
  ModelConfig cfg_;
  std::vector<std::pair<std::size_t, std::size_t>> order_;
};

}  // namespace lvlm
