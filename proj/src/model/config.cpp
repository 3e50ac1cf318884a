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

#include "lvlm/model/config.hpp"

#include <cmath>
#include <sstream>

#include "lvlm/numerics/errors.hpp"
#include "lvlm/numerics/rng.hpp"

namespace lvlm {

std::size_t ModelConfig::merge_window() const {
  auto s = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(merge_factor))));
  if (s * s != merge_factor || s <= 1) return 0;
  if (patch_rows() % s != 0 || patch_cols() % s != 0) return 0;
  return s;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("model config: " + m); };
  if (patch_size == 0 || channels == 0) fail("patch_size and channels must be positive");
  if (image_height % patch_size != 0 || image_width % patch_size != 0)
    fail("image dimensions must be multiples of patch_size");
  if (num_patches() == 0) fail("image smaller than one patch");
  if (merge_factor == 0 || num_patches() % merge_factor != 0)
    fail("patch count " + std::to_string(num_patches()) + " not divisible by merge factor " +
         std::to_string(merge_factor));
  if (d_embed < 2 || d_llm < 2) fail("model widths must be at least 2");
  if (enc_heads == 0 || d_embed % enc_heads != 0) fail("d_embed must divide into enc_heads");
  if (lm_heads == 0 || d_llm % lm_heads != 0) fail("d_llm must divide into lm_heads");
  if (vocab < 8) fail("vocabulary too small");
  if (lora && lora_rank == 0) fail("lora_rank must be positive when adapters are enabled");
  if (!(reasoner_dropout >= 0.0 && reasoner_dropout < 1.0))
    fail("reasoner_dropout must lie in [0, 1)");
}

void ModelConfig::validate_instantiable() const {
  validate();
  auto fail = [](const std::string& m) { throw ConfigError("model config: " + m); };
  if (enc_gated_ffn || lm_gated_ffn) fail("gated feed-forward is analytic-only");
  if (lm_kv_dim != d_llm) fail("grouped key/value width is analytic-only");
  if (!enc_learned_positions || !lm_learned_positions) fail("learned positions are required");
  if (!tie_head) fail("untied output head is analytic-only");
  if (max_seq < 8) fail("max_seq too small");
}

std::string ModelConfig::canonical_string() const {
  std::ostringstream os;
  os << "image_height=" << image_height << ";image_width=" << image_width
     << ";channels=" << channels << ";patch_size=" << patch_size << ";d_embed=" << d_embed
     << ";enc_blocks=" << enc_blocks << ";enc_heads=" << enc_heads
     << ";enc_ffn_hidden=" << enc_ffn_hidden << ";merge_factor=" << merge_factor
     << ";enc_learned_positions=" << enc_learned_positions << ";enc_gated_ffn=" << enc_gated_ffn
     << ";vocab=" << vocab << ";d_llm=" << d_llm << ";lm_blocks=" << lm_blocks
     << ";lm_heads=" << lm_heads << ";lm_kv_dim=" << lm_kv_dim
     << ";lm_ffn_hidden=" << lm_ffn_hidden << ";max_seq=" << max_seq
     << ";lm_learned_positions=" << lm_learned_positions << ";lm_gated_ffn=" << lm_gated_ffn
     << ";tie_head=" << tie_head << ";lora=" << lora << ";lora_rank=" << lora_rank
     << ";lora_alpha=" << lora_alpha << ";reasoner_dropout=" << reasoner_dropout;
  return os.str();
}

std::uint64_t ModelConfig::hash() const { return fnv1a64(canonical_string()); }

ModelConfig ModelConfig::toy() { return ModelConfig{}; }

ModelConfig ModelConfig::micro() {
  ModelConfig c;
  c.image_height = 12;
  c.image_width = 12;
  c.patch_size = 3;
  c.d_embed = 8;
  c.enc_blocks = 1;
  c.enc_heads = 2;
  c.enc_ffn_hidden = 16;
  c.merge_factor = 4;
  c.vocab = 32;
  c.d_llm = 8;
  c.lm_blocks = 1;
  c.lm_heads = 2;
  c.lm_kv_dim = 8;
  c.lm_ffn_hidden = 16;
  c.max_seq = 32;
  c.lora_rank = 2;
  c.lora_alpha = 4.0;
  return c;
}

ModelConfig ModelConfig::reference_7b() {
  // Dimensions follow the published Qwen2.5-7B language model and the
  // Qwen2.5-VL vision tower. The image side matches a 360p frame resized
  // to the encoder's 28-pixel merge grid (336 x 616 -> 24 x 44 patches).
  ModelConfig c;
  c.image_height = 336;
  c.image_width = 616;
  c.channels = 3;
  c.patch_size = 14;
  c.d_embed = 1280;
  c.enc_blocks = 32;
  c.enc_heads = 16;
  c.enc_ffn_hidden = 3420;
  c.merge_factor = 4;
  c.enc_learned_positions = false;
  c.enc_gated_ffn = true;
  c.vocab = 152064;
  c.d_llm = 3584;
  c.lm_blocks = 28;
  c.lm_heads = 28;
  c.lm_kv_dim = 512;
  c.lm_ffn_hidden = 18944;
  c.max_seq = 32768;
  c.lm_learned_positions = false;
  c.lm_gated_ffn = true;
  c.tie_head = false;
  c.lora = true;
  c.lora_rank = 4;
  c.lora_alpha = 8.0;
  return c;
}

}  // namespace lvlm
