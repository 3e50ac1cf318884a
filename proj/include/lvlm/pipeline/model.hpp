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

#include <cstdint>

#include "lvlm/lm/language_model.hpp"
#include "lvlm/model/config.hpp"
#include "lvlm/model/params.hpp"
#include "lvlm/reasoner/reasoner.hpp"
#include "lvlm/vision/encoder.hpp"

namespace lvlm {

/// Every parameter of the system in one store. Registration order, and
/// therefore checkpoint order, is encoder, projector, language model,
/// adapters, reasoner, unmerger. Each component draws its initial values
/// from its own named substream of `seed`.
template <typename T>
class VlmModel {
 public:
  VlmModel(const ModelConfig& cfg, std::uint64_t seed, bool with_reasoner_mlp = true);
  VlmModel(const VlmModel&) = delete;
  VlmModel& operator=(const VlmModel&) = delete;

  const ModelConfig& config() const { return cfg_; }

  ParamStore<T> params;
  VisionEncoder<T> encoder;
  LanguageModel<T> lm;
  VisualReasoner<T> reasoner;

 private:
  ModelConfig cfg_;
};

}  // namespace lvlm
