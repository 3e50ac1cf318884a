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
#include <string>
#include <vector>

#include "lvlm/numerics/grad_check.hpp"

namespace lvlm {

struct TensorGradCheck {
  std::string name;
  GradCheckResult result;
};

struct FullGraphGradCheck {
  std::vector<TensorGradCheck> tensors;
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
};

/// Gradient check of the two-pass training loss with respect to every
/// reasoner, unmerger and adapter coordinate on the micro config.
///
/// Every weight is redrawn at unit-order scale first: the zero-initialised
/// output maps (W_u, adapter B) would make most of these gradients
/// vanish identically, and the small initial backbone keeps the loss nearly
/// flat. Dropout is active with a fixed mask. The analytic gradient
/// is computed in precision T, the central differences in 64-bit on the
/// same (T-rounded) weights.
template <typename T>
FullGraphGradCheck full_graph_grad_check(std::uint64_t seed, double eps, double floor);

}  // namespace lvlm
