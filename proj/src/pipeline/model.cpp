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

#include "lvlm/pipeline/model.hpp"

namespace lvlm {

template <typename T>
VlmModel<T>::VlmModel(const ModelConfig& cfg, std::uint64_t seed, bool with_reasoner_mlp)
    : params(),
      encoder((cfg.validate_instantiable(), cfg), params, Rng(seed).split("encoder")),
      lm(cfg, params, Rng(seed).split("language_model"), cfg.lora),
      reasoner(cfg, params, Rng(seed).split("reasoner"), with_reasoner_mlp),
      cfg_(cfg) {}

template class VlmModel<float>;
template class VlmModel<double>;

}  // namespace lvlm
