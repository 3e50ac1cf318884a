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

#include "lvlm/vision/encoder.hpp"

#include <string>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {

std::vector<std::pair<std::size_t, std::size_t>> patch_order(const ModelConfig& cfg) {
  const std::size_t rows = cfg.patch_rows();
  const std::size_t cols = cfg.patch_cols();
  std::vector<std::pair<std::size_t, std::size_t>> order;
  order.reserve(rows * cols);
  const std::size_t s = cfg.merge_window();
  if (s == 0) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) order.emplace_back(r, c);
    return order;
  }
  for (std::size_t wr = 0; wr < rows; wr += s)
    for (std::size_t wc = 0; wc < cols; wc += s)
      for (std::size_t r = 0; r < s; ++r)
        for (std::size_t c = 0; c < s; ++c) order.emplace_back(wr + r, wc + c);
  return order;
}

template <typename T>
VisionEncoder<T>::VisionEncoder(const ModelConfig& cfg, ParamStore<T>& store, Rng rng)
    : cfg_(cfg), order_(patch_order(cfg)) {
  cfg.validate();
  const std::size_t d = cfg.d_embed;
  auto init = rng.split("init");
  patch_weight = store.add("encoder.patch.weight", Partition::Encoder,
                           normal_tensor<T>({d, cfg.patch_dim()}, fan_in_std(cfg.patch_dim()), init));
  patch_bias = store.add("encoder.patch.bias", Partition::Encoder, BasicTensor<T>::zeros({d}));
  positions = store.add("encoder.positions", Partition::Encoder,
                        normal_tensor<T>({cfg.num_patches(), d}, kInitStd, init));
  for (std::size_t b = 0; b < cfg.enc_blocks; ++b)
    blocks.push_back(BlockParams<T>::create(store, "encoder.block" + std::to_string(b) + ".",
                                            Partition::Encoder, d, cfg.enc_ffn_hidden, init));
  final_gain = store.add("encoder.final.gain", Partition::Encoder, BasicTensor<T>::filled({d}, 1));
  final_bias = store.add("encoder.final.bias", Partition::Encoder, BasicTensor<T>::zeros({d}));
  merger_weight =
      store.add("projector.weight", Partition::Projector,
                normal_tensor<T>({cfg.d_llm, cfg.merge_factor * d},
                                 fan_in_std(cfg.merge_factor * d), init));
  merger_bias = store.add("projector.bias", Partition::Projector, BasicTensor<T>::zeros({cfg.d_llm}));
}

template <typename T>
BasicTensor<T> VisionEncoder<T>::patchify(const ImageGrid& img) const {
  const std::size_t p = cfg_.patch_size;
  if (img.height != cfg_.image_height || img.width != cfg_.image_width ||
      img.channels != cfg_.channels)
    throw DimensionError("encoder expects " + std::to_string(cfg_.image_height) + "x" +
                         std::to_string(cfg_.image_width) + "x" + std::to_string(cfg_.channels) +
                         " images, got " + std::to_string(img.height) + "x" +
                         std::to_string(img.width) + "x" + std::to_string(img.channels));
  const std::size_t dim = cfg_.patch_dim();
  std::vector<T> flat(order_.size() * dim);
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const auto [pr, pc] = order_[i];
    T* out = flat.data() + i * dim;
    for (std::size_t y = 0; y < p; ++y)
      for (std::size_t x = 0; x < p; ++x)
        for (std::size_t c = 0; c < img.channels; ++c)
          *out++ = static_cast<T>(img.at(pr * p + y, pc * p + x, c));
  }
  return BasicTensor<T>({order_.size(), dim}, std::move(flat));
}

template <typename T>
BasicTensor<T> VisionEncoder<T>::embed_patches(const ImageGrid& img) const {
  return add(add_bias(linear(patchify(img), patch_weight), patch_bias), positions);
}

template <typename T>
BasicTensor<T> VisionEncoder<T>::encode(const BasicTensor<T>& pe, const BasicTensor<T>* delta) const {
  if (pe.shape() != Shape{cfg_.num_patches(), cfg_.d_embed})
    throw DimensionError("encode: patch embeddings have shape " + shape_str(pe.shape()));
  auto h = pe;
  if (delta) {
    if (delta->shape() != pe.shape())
      throw ContractError("encode: delta shape " + shape_str(delta->shape()) +
                          " does not match patch embeddings " + shape_str(pe.shape()));
    h = add(h, *delta);
  }
  for (const auto& b : blocks) h = transformer_block(b, h, cfg_.enc_heads, /*causal=*/false);
  return layernorm(h, final_gain, final_bias);
}

template <typename T>
BasicTensor<T> VisionEncoder<T>::merge_patches(const BasicTensor<T>& features) const {
  const std::size_t m = cfg_.merge_factor;
  if (features.rows() % m != 0)
    throw ConfigError("merge_patches: " + std::to_string(features.rows()) +
                      " patches not divisible by merge factor " + std::to_string(m));
  auto grouped = reshape(features, Shape{features.rows() / m, m * features.cols()});
  return add_bias(linear(grouped, merger_weight), merger_bias);
}

template class VisionEncoder<float>;
template class VisionEncoder<double>;

}  // namespace lvlm
