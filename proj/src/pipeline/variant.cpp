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

#include "lvlm/pipeline/variant.hpp"

namespace lvlm {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::FullMethod: return "FullMethod";
    case Variant::NoOriginalImage: return "NoOriginalImage";
    case Variant::NoMLP: return "NoMLP";
    case Variant::ImageFirst: return "ImageFirst";
    case Variant::PromptFirst: return "PromptFirst";
    case Variant::DuplicateImageBaseline: return "DuplicateImageBaseline";
    case Variant::PlainBaseline: return "PlainBaseline";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (auto v : kAllVariants)
    if (variant_name(v) == name) return v;
  return std::nullopt;
}

bool is_baseline(Variant v) {
  return v == Variant::DuplicateImageBaseline || v == Variant::PlainBaseline;
}

bool uses_reasoner_mlp(Variant v) { return v != Variant::NoMLP; }

Ordering PipelineConfig::effective_ordering() const {
  if (variant == Variant::ImageFirst) return Ordering::ImageFirst;
  if (variant == Variant::PromptFirst) return Ordering::PromptFirst;
  return ordering;
}

}  // namespace lvlm
