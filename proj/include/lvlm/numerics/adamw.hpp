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
#include <vector>

#include "lvlm/numerics/tensor.hpp"

namespace lvlm {

struct AdamWHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

/// AdamW with bias correction and decoupled weight decay.
///
/// Moments are kept per parameter in registration order. A parameter
/// without a gradient (absent grad) is treated as having a zero gradient,
/// so it still decays.
template <typename T>
class AdamW {
 public:
  AdamW(std::vector<BasicTensor<T>> params, AdamWHyper hyper);

  void step();
  void zero_grad();

  const AdamWHyper& hyper() const { return hyper_; }
  void set_lr(double lr) { hyper_.lr = lr; }
  std::uint64_t step_count() const { return t_; }

  const std::vector<BasicTensor<T>>& params() const { return params_; }
  const std::vector<std::vector<T>>& first_moment() const { return m_; }
  const std::vector<std::vector<T>>& second_moment() const { return v_; }

  /// Restores moments and step count (e.g. from a checkpoint).
  void load_state(std::vector<std::vector<T>> m, std::vector<std::vector<T>> v, std::uint64_t t);

 private:
  std::vector<BasicTensor<T>> params_;
  AdamWHyper hyper_;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
  std::uint64_t t_ = 0;
};

/// Single update on raw arrays; exposed for tests and for the stateless
/// form `adamw_step(params, grads, state)`.
template <typename T>
void adamw_update(std::span<T> param, std::span<const T> grad, std::span<T> m, std::span<T> v,
                  std::uint64_t t, const AdamWHyper& hyper);

}  // namespace lvlm
