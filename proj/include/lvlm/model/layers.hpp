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

#include <cmath>
#include <cstddef>
#include <string>

#include "lvlm/model/params.hpp"
#include "lvlm/numerics/ops.hpp"

namespace lvlm {

inline constexpr double kInitStd = 0.02;

/// Std of a backbone projection with `fan_in` inputs: unit output variance
/// for unit-variance inputs.
inline double fan_in_std(std::size_t fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); }

/// Low-rank adapter for one projection: W x + scale · B (A x).
/// A is [rank, d_in], B is [d_out, rank]; B starts at zero.
template <typename T>
struct LoraPair {
  BasicTensor<T> a;
  BasicTensor<T> b;
};

template <typename T>
struct BlockAdapters {
  LoraPair<T> q;
  LoraPair<T> v;
};

/// Pre-norm transformer block: x + Attn(LN(x)), then x + FFN(LN(x)).
/// Attention projections are bias-free; the feed-forward is
/// Linear → GELU → Linear with biases.
template <typename T>
struct BlockParams {
  BasicTensor<T> ln1_gain, ln1_bias;
  BasicTensor<T> wq, wk, wv, wo;
  BasicTensor<T> ln2_gain, ln2_bias;
  BasicTensor<T> ffn_w1, ffn_b1, ffn_w2, ffn_b2;

  static BlockParams create(ParamStore<T>& store, const std::string& prefix, Partition part,
                            std::size_t width, std::size_t ffn_hidden, Rng& rng);
};

template <typename T>
BlockAdapters<T> create_adapters(ParamStore<T>& store, const std::string& prefix,
                                 std::size_t width, std::size_t rank, Rng& rng);

/// Runs one block over rows of x [n, width]. `adapters` may be null; when
/// given, adapter outputs scaled by `lora_scale` are added to the query and
/// value projections.
template <typename T>
BasicTensor<T> transformer_block(const BlockParams<T>& p, const BasicTensor<T>& x,
                                 std::size_t heads, bool causal,
                                 const BlockAdapters<T>* adapters = nullptr,
                                 T lora_scale = T(0));

}  // namespace lvlm
