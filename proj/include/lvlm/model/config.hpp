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
#include <cstdint>
#include <string>

namespace lvlm {

/// Dimensions, counts and switches for encoder, language model, reasoner
/// and adapters.
///
/// The instantiable toy architecture uses learned positions, a two-matrix
/// GELU feed-forward with biases, bias-free attention projections and a
/// tied output head. The remaining switches (gated feed-forward, grouped
/// key/value width, rotary positions, untied head) exist so the analytic
/// counters in `param_budget` / `flop_report` can describe production-size
/// backbones that are never instantiated.
struct ModelConfig {
  // vision encoder
  std::size_t image_height = 24;
  std::size_t image_width = 24;
  std::size_t channels = 3;
  std::size_t patch_size = 6;
  std::size_t d_embed = 32;
  std::size_t enc_blocks = 2;
  std::size_t enc_heads = 4;
  std::size_t enc_ffn_hidden = 128;
  std::size_t merge_factor = 4;
  bool enc_learned_positions = true;
  bool enc_gated_ffn = false;

  // language model
  std::size_t vocab = 512;
  std::size_t d_llm = 64;
  std::size_t lm_blocks = 4;
  std::size_t lm_heads = 4;
  std::size_t lm_kv_dim = 64;
  std::size_t lm_ffn_hidden = 256;
  std::size_t max_seq = 128;
  bool lm_learned_positions = true;
  bool lm_gated_ffn = false;
  bool tie_head = true;

  // low-rank adapters on query/value projections
  bool lora = true;
  std::size_t lora_rank = 4;
  double lora_alpha = 8.0;

  // visual reasoner
  double reasoner_dropout = 0.1;

  std::size_t patch_rows() const { return image_height / patch_size; }
  std::size_t patch_cols() const { return image_width / patch_size; }
  std::size_t num_patches() const { return patch_rows() * patch_cols(); }
  std::size_t num_image_tokens() const { return num_patches() / merge_factor; }
  std::size_t patch_dim() const { return channels * patch_size * patch_size; }
  std::size_t reasoner_hidden() const { return 2 * d_llm; }
  /// Side length of the square merge window, or 0 when patches merge in
  /// raster order.
  std::size_t merge_window() const;

  /// Throws ConfigError for inconsistent dimensions.
  void validate() const;
  /// Additionally rejects switches the instantiable model does not support.
  void validate_instantiable() const;

  /// Stable 64-bit hash over every field; stored in checkpoints.
  std::uint64_t hash() const;
  std::string canonical_string() const;

  /// Desk-scale defaults (P = 16 patches, T = 4 image tokens).
  static ModelConfig toy();
  /// d_llm = d_embed = 8, one block each, T = 4. Used by gradient checks.
  static ModelConfig micro();
  /// Analytic stand-in for a 7B vision-language backbone (never instantiated).
  static ModelConfig reference_7b();
};

}  // namespace lvlm
