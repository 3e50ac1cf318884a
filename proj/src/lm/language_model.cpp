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

#include "lvlm/lm/language_model.hpp"

#include <string>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {

template <typename T>
LanguageModel<T>::LanguageModel(const ModelConfig& cfg, ParamStore<T>& store, Rng rng,
                                bool with_lora)
    : cfg_(cfg) {
  cfg.validate();
  const std::size_t d = cfg.d_llm;
  auto init = rng.split("init");
  token_table = store.add("lm.tokens", Partition::LanguageModel,
                          normal_tensor<T>({cfg.vocab, d}, kInitStd, init));
  positions = store.add("lm.positions", Partition::LanguageModel,
                        normal_tensor<T>({cfg.max_seq, d}, kInitStd, init));
  for (std::size_t b = 0; b < cfg.lm_blocks; ++b)
    blocks.push_back(BlockParams<T>::create(store, "lm.block" + std::to_string(b) + ".",
                                            Partition::LanguageModel, d, cfg.lm_ffn_hidden, init));
  final_gain = store.add("lm.final.gain", Partition::LanguageModel, BasicTensor<T>::filled({d}, 1));
  final_bias = store.add("lm.final.bias", Partition::LanguageModel, BasicTensor<T>::zeros({d}));
  if (with_lora) {
    auto lora_rng = rng.split("lora");
    for (std::size_t b = 0; b < cfg.lm_blocks; ++b)
      adapters.push_back(create_adapters(store, "lora.block" + std::to_string(b) + ".", d,
                                         cfg.lora_rank, lora_rng));
  }
}

template <typename T>
T LanguageModel<T>::lora_scale() const {
  return static_cast<T>(cfg_.lora_alpha / static_cast<double>(cfg_.lora_rank));
}

template <typename T>
BasicTensor<T> LanguageModel<T>::embed(const SequenceLayout& layout,
                                       const std::vector<BasicTensor<T>>& images) const {
  layout.validate(cfg_.num_image_tokens());
  if (images.size() != layout.spans.size())
    throw ContractError("language model: " + std::to_string(layout.spans.size()) +
                        " image spans but " + std::to_string(images.size()) +
                        " image token blocks supplied");
  if (layout.size() == 0) throw ContractError("language model: empty layout");
  if (layout.size() > cfg_.max_seq)
    throw ContractError("language model: sequence of " + std::to_string(layout.size()) +
                        " exceeds max_seq " + std::to_string(cfg_.max_seq));
  std::vector<BasicTensor<T>> parts;
  std::size_t pos = 0;
  auto flush_text = [&](std::size_t end) {
    if (end > pos)
      parts.push_back(embedding(token_table, std::span<const int>(layout.tokens).subspan(pos, end - pos)));
  };
  for (std::size_t i = 0; i < layout.spans.size(); ++i) {
    const auto& s = layout.spans[i];
    const auto& img = images[i];
    if (!img.defined() || img.shape() != Shape{s.length, cfg_.d_llm})
      throw ContractError("language model: image span " + std::to_string(i) +
                          " is not filled with [" + std::to_string(s.length) + ", " +
                          std::to_string(cfg_.d_llm) + "] tokens");
    flush_text(s.start);
    parts.push_back(img);
    pos = s.start + s.length;
  }
  flush_text(layout.size());
  auto x = parts.size() == 1 ? parts.front() : concat_rows(parts);
  return add(x, slice_rows(positions, 0, layout.size()));
}

template <typename T>
LmOutput<T> LanguageModel<T>::forward(const SequenceLayout& layout,
                                      const std::vector<BasicTensor<T>>& images, LoraGate gate,
                                      bool compute_logits) const {
  auto h = embed(layout, images);
  const bool use_lora = gate == LoraGate::Enabled && has_adapters();
  const T scale = lora_scale();
  for (std::size_t b = 0; b < blocks.size(); ++b)
    h = transformer_block(blocks[b], h, cfg_.lm_heads, /*causal=*/true,
                          use_lora ? &adapters[b] : nullptr, scale);
  LmOutput<T> out;
  out.hidden = layernorm(h, final_gain, final_bias);
  if (compute_logits) out.logits = head(out.hidden);
  return out;
}

template <typename T>
BasicTensor<T> LanguageModel<T>::head(const BasicTensor<T>& hidden) const {
  return linear(hidden, token_table);
}

template <typename T>
BasicTensor<T> extract_hint(const BasicTensor<T>& hidden, const SequenceLayout& layout) {
  const ImageSpan* found = nullptr;
  for (const auto& s : layout.spans) {
    if (s.source != SpanSource::Original) continue;
    if (found) throw ContractError("extract_hint: layout has more than one original image span");
    found = &s;
  }
  if (!found) throw ContractError("extract_hint: layout has no original image span");
  if (hidden.rows() != layout.size())
    throw ContractError("extract_hint: hidden states have " + std::to_string(hidden.rows()) +
                        " rows for a layout of length " + std::to_string(layout.size()));
  return slice_rows(hidden, found->start, found->length);
}

template <typename T>
int argmax_lowest(std::span<const T> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

std::vector<int> greedy_decode(
    const std::function<std::optional<std::vector<double>>(const std::vector<int>&)>& next_logits,
    std::size_t max_new, int eos) {
  std::vector<int> out;
  while (out.size() < max_new) {
    auto scores = next_logits(out);
    if (!scores) break;
    const int next = argmax_lowest<double>(*scores);
    out.push_back(next);
    if (next == eos) break;
  }
  return out;
}

template <typename T>
std::vector<int> greedy_decode(const LanguageModel<T>& lm, const SequenceLayout& prefix,
                               const std::vector<BasicTensor<T>>& images, std::size_t max_new,
                               LoraGate gate) {
  NoGradGuard no_grad;
  auto layout = prefix;
  const std::size_t base = layout.tokens.size();
  return greedy_decode(
      [&](const std::vector<int>& generated) -> std::optional<std::vector<double>> {
        layout.tokens.resize(base);
        layout.tokens.insert(layout.tokens.end(), generated.begin(), generated.end());
        if (layout.size() > lm.config().max_seq) return std::nullopt;
        auto out = lm.forward(layout, images, gate, /*compute_logits=*/false);
        auto last = lm.head(slice_rows(out.hidden, layout.size() - 1, 1));
        return std::vector<double>(last.data().begin(), last.data().end());
      },
      max_new);
}

template class LanguageModel<float>;
template class LanguageModel<double>;
template BasicTensor<float> extract_hint(const BasicTensor<float>&, const SequenceLayout&);
template BasicTensor<double> extract_hint(const BasicTensor<double>&, const SequenceLayout&);
template int argmax_lowest(std::span<const float>);
template int argmax_lowest(std::span<const double>);
template std::vector<int> greedy_decode(const LanguageModel<float>&, const SequenceLayout&,
                                        const std::vector<BasicTensor<float>>&, std::size_t,
                                        LoraGate);
template std::vector<int> greedy_decode(const LanguageModel<double>&, const SequenceLayout&,
                                        const std::vector<BasicTensor<double>>&, std::size_t,
                                        LoraGate);

}  // namespace lvlm
