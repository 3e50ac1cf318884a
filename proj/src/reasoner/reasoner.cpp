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

#include "lvlm/reasoner/reasoner.hpp"

#include <string>

#include "lvlm/model/layers.hpp"

namespace lvlm {

template <typename T>
VisualReasoner<T>::VisualReasoner(const ModelConfig& cfg, ParamStore<T>& store, Rng rng,
                                  bool with_mlp)
    : cfg_(cfg), with_mlp_(with_mlp) {
  const std::size_t d = cfg.d_llm;
  const std::size_t h = cfg.reasoner_hidden();
  auto init = rng.split("init");
  if (with_mlp) {
    w_gate = store.add("reasoner.w_gate", Partition::Reasoner, normal_tensor<T>({d, d}, kInitStd, init));
    w_1 = store.add("reasoner.w_1", Partition::Reasoner, normal_tensor<T>({h, d}, kInitStd, init));
    w_2 = store.add("reasoner.w_2", Partition::Reasoner, normal_tensor<T>({h, h}, kInitStd, init));
    w_p = store.add("reasoner.w_p", Partition::Reasoner, normal_tensor<T>({d, h}, kInitStd, init));
  }
  w_unmerge = store.add("unmerger.weight", Partition::Unmerger,
                        BasicTensor<T>::zeros({cfg.merge_factor * cfg.d_embed, d}));
}

template <typename T>
ReasonerTrace<T> VisualReasoner<T>::reason_traced(const BasicTensor<T>& z, bool training,
                                                 Rng& rng) const {
  if (z.dim() != 2 || z.cols() != cfg_.d_llm)
    throw ContractError("reason: expected [T, " + std::to_string(cfg_.d_llm) + "] input, got " +
                        shape_str(z.shape()));
  if (!with_mlp_) return {z, {}};
  ReasonerTrace<T> t;
  t.gate = sigmoid(linear(z, w_gate));
  auto value = dropout(linear(gelu(linear(z, w_1)), w_2), cfg_.reasoner_dropout, training, rng);
  t.output = mul(t.gate, linear(value, w_p));
  return t;
}

template <typename T>
BasicTensor<T> VisualReasoner<T>::reason(const BasicTensor<T>& z, bool training, Rng& rng) const {
  return reason_traced(z, training, rng).output;
}

template <typename T>
BasicTensor<T> VisualReasoner<T>::unmerge(const BasicTensor<T>& r, std::size_t num_patches) const {
  const std::size_t m = cfg_.merge_factor;
  if (r.dim() != 2 || r.cols() != cfg_.d_llm)
    throw ContractError("unmerge: expected width " + std::to_string(cfg_.d_llm) + ", got " +
                        shape_str(r.shape()));
  if (r.rows() * m != num_patches)
    throw ContractError("unmerge: " + std::to_string(r.rows()) + " tokens x merge factor " +
                        std::to_string(m) + " != " + std::to_string(num_patches) + " patches");
  return reshape(linear(r, w_unmerge), Shape{num_patches, cfg_.d_embed});
}

template class VisualReasoner<float>;
template class VisualReasoner<double>;

}  // namespace lvlm
