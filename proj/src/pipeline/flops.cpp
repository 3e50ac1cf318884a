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

#include "lvlm/pipeline/flops.hpp"

namespace lvlm {
namespace {

double mm(double m, double k, double n) { return 2.0 * m * k * n; }

// n rows through one block: projections, attention scores and mixing, and
// the feed-forward (three matrices when gated).
double block_flops(double n, double d, double kv, double ffn, bool gated) {
  const double proj = mm(n, d, d) * 2 + mm(n, d, kv) * 2;
  const double attn = mm(n, d, n) * 2;
  const double mlp = mm(n, d, ffn) * (gated ? 3 : 2);
  return proj + attn + mlp;
}

double encoder_blocks(const ModelConfig& c) {
  return static_cast<double>(c.enc_blocks) *
         block_flops(c.num_patches(), c.d_embed, c.d_embed, c.enc_ffn_hidden, c.enc_gated_ffn);
}

double lm_flops(const ModelConfig& c, double len, bool logits) {
  double f = static_cast<double>(c.lm_blocks) *
             block_flops(len, c.d_llm, c.lm_kv_dim, c.lm_ffn_hidden, c.lm_gated_ffn);
  if (logits) f += mm(len, c.d_llm, c.vocab);
  return f;
}

}  // namespace

FlopReport flop_report(const ModelConfig& cfg, const SequenceLengths& len) {
  const double P = cfg.num_patches();
  const double T = cfg.num_image_tokens();
  const double d = cfg.d_llm;
  const double q = len.query_tokens;
  const double a = len.answer_tokens;

  FlopReport r;
  r.encoder = mm(P, cfg.patch_dim(), cfg.d_embed) + encoder_blocks(cfg);
  r.merger = mm(T, cfg.merge_factor * cfg.d_embed, d);
  r.baseline_lm = lm_flops(cfg, T + 1 + q + 1 + a, true);
  r.pass1_lm = lm_flops(cfg, T + 1 + q, false);
  const double h = cfg.reasoner_hidden();
  r.reasoner = mm(T, d, d) + mm(T, d, h) + mm(T, h, h) + mm(T, h, d);
  r.unmerger = mm(T, d, cfg.merge_factor * cfg.d_embed);
  r.pass2_encoder = encoder_blocks(cfg);
  r.pass2_lm = lm_flops(cfg, 2 * T + 2 + q + 1 + a, true);

  r.baseline = r.encoder + r.merger + r.baseline_lm;
  r.pass1 = r.encoder + r.merger + r.pass1_lm;
  r.pass2 = r.reasoner + r.unmerger + r.pass2_encoder + r.merger + r.pass2_lm;
  r.two_pass = r.pass1 + r.pass2;
  r.ratio = r.two_pass / r.baseline;
  r.reasoner_fraction = (r.reasoner + r.unmerger) / r.two_pass;
  return r;
}

}  // namespace lvlm
