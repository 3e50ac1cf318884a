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

#include "lvlm/model/layers.hpp"

#include <cmath>
#include <vector>

namespace lvlm {

template <typename T>
BlockParams<T> BlockParams<T>::create(ParamStore<T>& store, const std::string& prefix,
                                      Partition part, std::size_t width, std::size_t ffn_hidden,
                                      Rng& rng) {
  auto normal = [&](const std::string& name, Shape shape) {
    const double std = fan_in_std(shape[1]);
    return store.add(prefix + name, part, normal_tensor<T>(std::move(shape), std, rng));
  };
  auto fill = [&](const std::string& name, std::size_t n, T v) {
    return store.add(prefix + name, part, BasicTensor<T>::filled({n}, v));
  };
  BlockParams p;
  p.ln1_gain = fill("ln1.gain", width, T(1));
  p.ln1_bias = fill("ln1.bias", width, T(0));
  p.wq = normal("attn.wq", {width, width});
  p.wk = normal("attn.wk", {width, width});
  p.wv = normal("attn.wv", {width, width});
  p.wo = normal("attn.wo", {width, width});
  p.ln2_gain = fill("ln2.gain", width, T(1));
  p.ln2_bias = fill("ln2.bias", width, T(0));
  p.ffn_w1 = normal("ffn.w1", {ffn_hidden, width});
  p.ffn_b1 = fill("ffn.b1", ffn_hidden, T(0));
  p.ffn_w2 = normal("ffn.w2", {width, ffn_hidden});
  p.ffn_b2 = fill("ffn.b2", width, T(0));
  return p;
}

template <typename T>
BlockAdapters<T> create_adapters(ParamStore<T>& store, const std::string& prefix,
                                 std::size_t width, std::size_t rank, Rng& rng) {
  const double a_std = 1.0 / std::sqrt(static_cast<double>(width));
  auto pair = [&](const std::string& which) {
    LoraPair<T> lp;
    lp.a = store.add(prefix + which + ".A", Partition::Lora,
                     normal_tensor<T>({rank, width}, a_std, rng));
    lp.b = store.add(prefix + which + ".B", Partition::Lora,
                     BasicTensor<T>::zeros({width, rank}));
    return lp;
  };
  BlockAdapters<T> ad;
  ad.q = pair("q");
  ad.v = pair("v");
  return ad;
}

template <typename T>
BasicTensor<T> transformer_block(const BlockParams<T>& p, const BasicTensor<T>& x,
                                 std::size_t heads, bool causal, const BlockAdapters<T>* adapters,
                                 T lora_scale) {
  const std::size_t width = x.cols();
  const std::size_t head_dim = width / heads;
  const T score_scale = T(1) / std::sqrt(T(head_dim));

  auto h = layernorm(x, p.ln1_gain, p.ln1_bias);
  auto q = linear(h, p.wq);
  auto k = linear(h, p.wk);
  auto v = linear(h, p.wv);
  if (adapters) {
    q = add(q, scale(linear(linear(h, adapters->q.a), adapters->q.b), lora_scale));
    v = add(v, scale(linear(linear(h, adapters->v.a), adapters->v.b), lora_scale));
  }
  std::vector<BasicTensor<T>> outs;
  outs.reserve(heads);
  for (std::size_t i = 0; i < heads; ++i) {
    auto qh = slice_cols(q, i * head_dim, head_dim);
    auto kh = slice_cols(k, i * head_dim, head_dim);
    auto vh = slice_cols(v, i * head_dim, head_dim);
    auto attn = softmax_rows(scale(matmul_nt(qh, kh), score_scale), causal);
    outs.push_back(matmul(attn, vh));
  }
  auto attended = heads == 1 ? outs.front() : concat_cols(outs);
  auto x1 = add(x, linear(attended, p.wo));

  auto h2 = layernorm(x1, p.ln2_gain, p.ln2_bias);
  auto ff = add_bias(linear(gelu(add_bias(linear(h2, p.ffn_w1), p.ffn_b1)), p.ffn_w2), p.ffn_b2);
  return add(x1, ff);
}

template struct BlockParams<float>;
template struct BlockParams<double>;
template BlockAdapters<float> create_adapters(ParamStore<float>&, const std::string&, std::size_t,
                                              std::size_t, Rng&);
template BlockAdapters<double> create_adapters(ParamStore<double>&, const std::string&,
                                               std::size_t, std::size_t, Rng&);
template BasicTensor<float> transformer_block(const BlockParams<float>&, const BasicTensor<float>&,
                                              std::size_t, bool, const BlockAdapters<float>*,
                                              float);
template BasicTensor<double> transformer_block(const BlockParams<double>&,
                                               const BasicTensor<double>&, std::size_t, bool,
                                               const BlockAdapters<double>*, double);

}  // namespace lvlm
