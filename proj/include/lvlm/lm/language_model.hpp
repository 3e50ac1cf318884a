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

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lvlm/lm/layout.hpp"
#include "lvlm/model/config.hpp"
#include "lvlm/model/layers.hpp"
#include "lvlm/model/params.hpp"

namespace lvlm {

/// Whether the query/value adapters contribute to a forward pass.
enum class LoraGate { Enabled, Disabled };

template <typename T>
struct LmOutput {
  /// [L, vocab]; undefined when logits were not requested.
  BasicTensor<T> logits;
  /// Final-layer hidden states after the closing norm: [L, d_llm].
  BasicTensor<T> hidden;
};

/// Causal pre-norm decoder with learned positions and a tied output head.
template <typename T>
class LanguageModel {
 public:
  /// Adapters are registered (partition Lora) only when `with_lora`.
  LanguageModel(const ModelConfig& cfg, ParamStore<T>& store, Rng rng, bool with_lora);

  /// Text embeddings with image spans filled from `images` (one [T, d_llm]
  /// tensor per span, in span order), plus positions.
  BasicTensor<T> embed(const SequenceLayout& layout,
                       const std::vector<BasicTensor<T>>& images) const;

  LmOutput<T> forward(const SequenceLayout& layout, const std::vector<BasicTensor<T>>& images,
                      LoraGate gate, bool compute_logits = true) const;

  /// Tied head: hidden [n, d_llm] → logits [n, vocab].
  BasicTensor<T> head(const BasicTensor<T>& hidden) const;

  bool has_adapters() const { return !adapters.empty(); }
  T lora_scale() const;
  const ModelConfig& config() const { return cfg_; }

  BasicTensor<T> token_table, positions;
  std::vector<BlockParams<T>> blocks;
  std::vector<BlockAdapters<T>> adapters;
  BasicTensor<T> final_gain, final_bias;

 private:
  ModelConfig cfg_;
};

/// Rows of `hidden` at the single original-image span, in order.
/// Throws ContractError unless the layout has exactly one such span.
template <typename T>
BasicTensor<T> extract_hint(const BasicTensor<T>& hidden, const SequenceLayout& layout);

/// Index of the largest value; ties go to the lowest index.
template <typename T>
int argmax_lowest(std::span<const T> values);

/// Greedy generation against an arbitrary next-token scorer. `next_logits`
/// receives the tokens generated so far and returns scores over the
/// vocabulary, or nullopt when the context is exhausted. The end token is
/// included in the output when produced.
std::vector<int> greedy_decode(
    const std::function<std::optional<std::vector<double>>(const std::vector<int>&)>& next_logits,
    std::size_t max_new, int eos = tokens::kEos);

/// Greedy generation continuing `prefix` (which should end at kAnswer).
/// Runs without recording gradients.
template <typename T>
std::vector<int> greedy_decode(const LanguageModel<T>& lm, const SequenceLayout& prefix,
                               const std::vector<BasicTensor<T>>& images, std::size_t max_new,
                               LoraGate gate);

}  // namespace lvlm
