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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "lvlm/lm/layout.hpp"
#include "lvlm/model/config.hpp"
#include "lvlm/numerics/adamw.hpp"

namespace lvlm {

enum class Variant {
  FullMethod,
  NoOriginalImage,
  NoMLP,
  ImageFirst,
  PromptFirst,
  DuplicateImageBaseline,
  PlainBaseline,
};

inline constexpr std::array<Variant, 7> kAllVariants = {
    Variant::FullMethod,  Variant::NoOriginalImage,        Variant::NoMLP,
    Variant::ImageFirst,  Variant::PromptFirst,            Variant::DuplicateImageBaseline,
    Variant::PlainBaseline};

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

/// Baselines run a single pass with no feedback and are never trained.
bool is_baseline(Variant v);
/// False only for NoMLP, whose reasoner is the identity.
bool uses_reasoner_mlp(Variant v);

struct PipelineConfig {
  Variant variant = Variant::FullMethod;
  ModelConfig model;  // model.lora switches the pass-1 adapters
  /// Ordering for variants that do not fix one. ImageFirst and PromptFirst
  /// override it.
  Ordering ordering = Ordering::ImageFirst;
  AdamWHyper optimizer;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::size_t max_new_tokens = 12;

  Ordering effective_ordering() const;
};

}  // namespace lvlm
