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

#include "lvlm/model/config.hpp"

namespace lvlm {

/// Parameter counts per partition, computed from dimensions alone.
struct PartitionCounts {
  std::uint64_t encoder = 0;
  std::uint64_t projector = 0;
  std::uint64_t language_model = 0;
  std::uint64_t reasoner = 0;
  std::uint64_t unmerger = 0;
  std::uint64_t lora = 0;  // zero unless cfg.lora

  std::uint64_t total() const {
    return encoder + projector + language_model + reasoner + unmerger + lora;
  }
};

PartitionCounts analytic_counts(const ModelConfig& cfg, bool with_mlp = true);

struct ParamBudget {
  PartitionCounts counts;
  /// Reasoner + unmerger (+ adapters when cfg.lora).
  std::uint64_t trainable = 0;
  std::uint64_t total = 0;
  double ratio = 0.0;
};

ParamBudget param_budget(const ModelConfig& cfg, bool with_mlp = true);

}  // namespace lvlm
