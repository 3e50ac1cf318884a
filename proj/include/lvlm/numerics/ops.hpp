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

// Differentiable tensor operations. Two-dimensional operands are
// [rows, cols]; row-wise operations accept any rank and treat the last
// extent as the row width. Instantiated for float and double.

#include <cstddef>
#include <span>
#include <vector>

#include "lvlm/numerics/rng.hpp"
#include "lvlm/numerics/tensor.hpp"

namespace lvlm {

inline constexpr double kLayerNormEps = 1e-5;

// Elementwise arithmetic. Operands must have identical shapes.
template <typename T> BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> scale(const BasicTensor<T>& a, T factor);

/// x[.., d] + bias[d] broadcast over rows.
template <typename T> BasicTensor<T> add_bias(const BasicTensor<T>& x, const BasicTensor<T>& bias);

/// a[m,k] · b[k,n].
template <typename T> BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b);
/// a[m,k] · b[n,k]ᵀ. Also the linear map x·Wᵀ for weights stored [out, in].
template <typename T> BasicTensor<T> matmul_nt(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T>
BasicTensor<T> linear(const BasicTensor<T>& x, const BasicTensor<T>& weight) {
  return matmul_nt(x, weight);
}

/// Exact GELU, 0.5·x·(1 + erf(x/√2)).
template <typename T> BasicTensor<T> gelu(const BasicTensor<T>& x);
template <typename T> BasicTensor<T> sigmoid(const BasicTensor<T>& x);

/// Row-wise softmax. With `causal`, entry (i, j) is masked for j > i.
template <typename T> BasicTensor<T> softmax_rows(const BasicTensor<T>& x, bool causal);

/// Per-row normalisation to zero mean / unit variance, then gain·x̂ + bias.
template <typename T>
BasicTensor<T> layernorm(const BasicTensor<T>& x, const BasicTensor<T>& gain,
                         const BasicTensor<T>& bias, double eps = kLayerNormEps);

/// Inverted dropout: kept entries scale by 1/(1-p); identity when not training.
template <typename T>
BasicTensor<T> dropout(const BasicTensor<T>& x, double p, bool training, Rng& rng);

/// Mean cross-entropy over positions with ignore[i] == false.
/// An empty `ignore` span means no position is ignored.
template <typename T>
BasicTensor<T> softmax_ce(const BasicTensor<T>& logits, std::span<const int> targets,
                          std::span<const bool> ignore = {});

/// Gathers rows of table[V, d] by id.
template <typename T>
BasicTensor<T> embedding(const BasicTensor<T>& table, std::span<const int> ids);

template <typename T>
BasicTensor<T> slice_rows(const BasicTensor<T>& x, std::size_t start, std::size_t count);
template <typename T> BasicTensor<T> concat_rows(const std::vector<BasicTensor<T>>& parts);
template <typename T>
BasicTensor<T> slice_cols(const BasicTensor<T>& x, std::size_t start, std::size_t count);
template <typename T> BasicTensor<T> concat_cols(const std::vector<BasicTensor<T>>& parts);

/// Same row-major data under a new shape with equal element count.
template <typename T> BasicTensor<T> reshape(const BasicTensor<T>& x, Shape shape);

template <typename T> BasicTensor<T> sum(const BasicTensor<T>& x);
template <typename T> BasicTensor<T> mean(const BasicTensor<T>& x);

/// Converts values between precisions; the result is a fresh leaf.
template <typename To, typename From>
BasicTensor<To> cast(const BasicTensor<From>& x, bool requires_grad = false) {
  std::vector<To> v(x.data().begin(), x.data().end());
  return BasicTensor<To>(x.shape(), std::move(v), requires_grad);
}

}  // namespace lvlm
