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

#include "lvlm/model/config.hpp"
#include "lvlm/model/params.hpp"
#include "lvlm/numerics/ops.hpp"

namespace lvlm {

/// Gate and value path of one reasoner evaluation, kept for diagnostics.
template <typename T>
struct ReasonerTrace {
  BasicTensor<T> output;  // [T, d_llm]
  BasicTensor<T> gate;    // sigmoid(z W_gᵀ), undefined for the identity reasoner
};

/// Gated MLP over image-token hidden states followed by the patch
/// unmerger back into encoder embedding space:
///
///   out   = sigmoid(z W_gᵀ) ⊙ (Dropout(GELU(z W_1ᵀ) W_2ᵀ) W_pᵀ)
///   delta = reshape(out W_uᵀ, [T·m, d_embed])
///
/// Widths: W_g d→d, W_1 d→2d, W_2 2d→2d, W_p 2d→d; no biases. W_u starts
/// at zero so the initial delta is exactly zero; W_p starts small and
/// nonzero, since zeroing both would leave every reasoner gradient at zero. With `with_mlp`
/// false the gated MLP is absent and `reason` returns its input; the
/// unmerger is still learned.
template <typename T>
class VisualReasoner {
 public:
  VisualReasoner(const ModelConfig& cfg, ParamStore<T>& store, Rng rng, bool with_mlp = true);

  BasicTensor<T> reason(const BasicTensor<T>& z, bool training, Rng& rng) const;
  ReasonerTrace<T> reason_traced(const BasicTensor<T>& z, bool training, Rng& rng) const;

  /// [T, d_llm] → [num_patches, d_embed]; throws ContractError unless
  /// T·m == num_patches.
  BasicTensor<T> unmerge(const BasicTensor<T>& r, std::size_t num_patches) const;

  bool has_mlp() const { return with_mlp_; }
  double dropout_p() const { return cfg_.reasoner_dropout; }

  BasicTensor<T> w_gate, w_1, w_2, w_p;  // undefined without the MLP
  BasicTensor<T> w_unmerge;

 private:
  ModelConfig cfg_;
  bool with_mlp_;
};

}  // namespace lvlm
