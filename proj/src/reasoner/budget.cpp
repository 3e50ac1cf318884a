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

#include "lvlm/reasoner/budget.hpp"

namespace lvlm {
namespace {

using u64 = std::uint64_t;

// Pre-norm block: two affine norms, bias-free attention projections, and
// either a biased two-matrix feed-forward or a bias-free gated one.
u64 block_params(u64 d, u64 kv, u64 ffn, bool gated) {
  const u64 norms = 4 * d;
  const u64 attn = 2 * d * d + 2 * d * kv;
  const u64 mlp = gated ? 3 * d * ffn : 2 * d * ffn + ffn + d;
  return norms + attn + mlp;
}

}  // namespace

PartitionCounts analytic_counts(const ModelConfig& cfg, bool with_mlp) {
  PartitionCounts c;
  const u64 de = cfg.d_embed;
  const u64 d = cfg.d_llm;
  const u64 m = cfg.merge_factor;

  c.encoder = cfg.patch_dim() * de + de + (cfg.enc_learned_positions ? cfg.num_patches() * de : 0) +
              cfg.enc_blocks * block_params(de, de, cfg.enc_ffn_hidden, cfg.enc_gated_ffn) + 2 * de;
  c.projector = m * de * d + d;
  c.language_model = cfg.vocab * d + (cfg.lm_learned_positions ? cfg.max_seq * d : 0) +
                     cfg.lm_blocks * block_params(d, cfg.lm_kv_dim, cfg.lm_ffn_hidden, cfg.lm_gated_ffn) +
                     2 * d + (cfg.tie_head ? 0 : cfg.vocab * d);
  const u64 h = cfg.reasoner_hidden();
  c.reasoner = with_mlp ? d * d + h * d + h * h + d * h : 0;
  c.unmerger = m * de * d;
  if (cfg.lora) {
    const u64 r = cfg.lora_rank;
    c.lora = cfg.lm_blocks * ((r * d + d * r) + (r * d + cfg.lm_kv_dim * r));
  }
  return c;
}

ParamBudget param_budget(const ModelConfig& cfg, bool with_mlp) {
  ParamBudget b;
  b.counts = analytic_counts(cfg, with_mlp);
  b.trainable = b.counts.reasoner + b.counts.unmerger + b.counts.lora;
  b.total = b.counts.total();
  b.ratio = static_cast<double>(b.trainable) / static_cast<double>(b.total);
  return b;
}

}  // namespace lvlm
