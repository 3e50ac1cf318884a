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
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lvlm/datasets/sample.hpp"
#include "lvlm/lm/layout.hpp"
#include "lvlm/numerics/adamw.hpp"
#include "lvlm/pipeline/model.hpp"
#include "lvlm/pipeline/variant.hpp"

namespace lvlm {

struct GateStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

template <typename T>
GateStats gate_stats(const BasicTensor<T>& gate);

/// Raised by a training step whose loss is NaN or infinite.
class NonFiniteLossError : public std::runtime_error {
 public:
  NonFiniteLossError(double loss, GateStats gate);
  double loss() const { return loss_; }
  const GateStats& gate() const { return gate_; }

 private:
  double loss_;
  GateStats gate_;
};

/// Intermediate values of one pipeline evaluation.
template <typename T>
struct PassTrace {
  SequenceLayout first_layout;   // empty for baselines
  SequenceLayout answer_layout;  // the layout the prediction is read from
  BasicTensor<T> first_features;   // encoder output of the plain image
  BasicTensor<T> second_features;  // encoder output of the perturbed image
  BasicTensor<T> hint, reasoned, delta, gate;
  /// Image token blocks filling `answer_layout`'s spans.
  std::vector<BasicTensor<T>> images;
  /// Final hidden states of the answer pass.
  BasicTensor<T> hidden;
};

template <typename T>
struct TrainStepResult {
  double loss = 0.0;
  std::map<Partition, double> grad_norms;
  GateStats gate;
};

template <typename T>
struct InferResult {
  std::vector<int> tokens;
  GateStats gate;
};

/// The two-pass feedback pipeline and its baselines.
///
/// Feedback variants: pass 1 encodes the image and runs the language model
/// (adapters enabled) on [image][query]; the hidden states at the image
/// span go through the reasoner and unmerger to a patch-embedding delta;
/// pass 2 re-encodes embeddings + delta and runs the base language model
/// (adapters always off) on the answer layout. Baselines run the answer
/// layout once with the plain image, single or duplicated.
template <typename T>
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);

  const PipelineConfig& config() const { return cfg_; }
  Variant variant() const { return cfg_.variant; }
  VlmModel<T>& model() { return *model_; }
  const VlmModel<T>& model() const { return *model_; }

  struct Hooks {
    std::function<void(const SequenceLayout&)> on_second_pass_layout;
    /// Receives the reasoner input (hint) and output.
    std::function<void(const BasicTensor<T>&, const BasicTensor<T>&)> on_reason;
  };
  Hooks hooks;

  /// Runs everything up to the answer-pass hidden states. `labels` is
  /// appended after kAnswer; pass an empty span to get a decoding prefix.
  PassTrace<T> run(const ImageGrid& image, std::span<const int> query, std::span<const int> labels,
                   bool training, Rng& rng) const;

  /// Mean cross-entropy of labels + end token, read from the answer pass.
  BasicTensor<T> loss(const Sample& sample, bool training, Rng& rng,
                      PassTrace<T>* trace = nullptr) const;

  /// Logits at the positions predicting each label token and the end token.
  BasicTensor<T> label_logits(const PassTrace<T>& trace) const;

  /// One optimisation step on `sample`; only tensors with requires_grad
  /// move. Throws NonFiniteLossError before touching any parameter.
  TrainStepResult<T> train_step(const Sample& sample, AdamW<T>& optimizer, Rng& rng);

  /// Greedy answer with dropout off.
  InferResult<T> infer(const ImageGrid& image, std::span<const int> query,
                       std::size_t max_new) const;
  InferResult<T> infer(const ImageGrid& image, std::span<const int> query) const {
    return infer(image, query, cfg_.max_new_tokens);
  }

 private:
  SecondPassImages answer_images() const;

  PipelineConfig cfg_;
  std::unique_ptr<VlmModel<T>> model_;
};

/// Targets for a training layout: labels followed by the end token.
std::vector<int> with_eos(std::span<const int> labels);

}  // namespace lvlm
