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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lvlm/datasets/sample.hpp"
#include "lvlm/pipeline/checkpoint.hpp"
#include "lvlm/pipeline/pipeline.hpp"

namespace lvlm {

inline constexpr std::size_t kCheckpointEvery = 200;

struct TrainOptions {
  /// Optimisation steps; 0 means one pass over the data.
  std::size_t steps = 0;
  /// Seeds the per-epoch data order and dropout.
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = kCheckpointEvery;
  /// Receives a snapshot (with optimizer state) every `checkpoint_every`
  /// steps and at the end of every epoch.
  std::function<void(const Checkpoint&)> on_checkpoint;
};

struct TrainLog {
  std::vector<double> losses;  // one per step
  std::size_t steps = 0;

  /// Mean of the last `window` losses.
  double recent_loss(std::size_t window = 50) const;
};

/// Checkpoint hash used throughout: the architecture's config hash.
std::uint64_t checkpoint_hash(const ModelConfig& cfg);

/// Builds the pipeline and, when given, overwrites its backbone tensors from
/// `backbone`. Reasoner and adapter tensors keep their seeded init.
std::unique_ptr<Pipeline<float>> build_pipeline(const PipelineConfig& cfg,
                                                const Checkpoint* backbone = nullptr);

/// Trains reasoner, unmerger and adapters with the backbone frozen, using
/// the pipeline's optimizer settings. Data order is reshuffled each epoch.
/// Baselines have nothing to train and return an empty log. Propagates
/// NonFiniteLossError.
TrainLog train_reasoner(Pipeline<float>& pipeline, const std::vector<Sample>& data,
                        const TrainOptions& options);

/// Single-pass loss of the backbone alone on one layout: the plain image
/// (OriginalOnly) or the image twice (OriginalTwice). With `blank_span`,
/// that image span shows an all-black image instead.
template <typename T>
BasicTensor<T> backbone_loss(const VlmModel<T>& model, const Sample& sample, SecondPassImages images,
                             Ordering ordering, std::optional<std::size_t> blank_span = std::nullopt);

struct PretrainOptions {
  std::size_t steps = 0;  ///< optimizer steps
  std::size_t batch = 8;  ///< samples averaged per step
  std::uint64_t seed = 0;
  AdamWHyper optimizer{1e-3, 0.9, 0.999, 1e-8, 0.01};
  double blank_probability = 0.5;
};

/// Trains encoder, projector and language model. Each step draws the layout
/// (single or two image spans, image-first or prompt-first) so the frozen
/// backbone later accepts every answer-pass layout. With probability
/// `blank_probability` one of two spans is blanked, which teaches the
/// language model to read either span rather than only the first.
TrainLog pretrain_backbone(VlmModel<float>& model, const std::vector<Sample>& data,
                           const PretrainOptions& options);

/// Mean pipeline loss with dropout off and no graph.
template <typename T>
double mean_loss(const Pipeline<T>& pipeline, const std::vector<Sample>& data);

/// Mean backbone loss over the four pretraining layouts.
double mean_backbone_loss(const VlmModel<float>& model, const std::vector<Sample>& data);

/// 1e-2, 10^-2.5, ..., 1e-5.
std::array<double, 7> sweep_learning_rates();

struct SweepArm {
  double lr = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  std::optional<Checkpoint> checkpoint;
};

struct SweepResult {
  std::vector<SweepArm> arms;
  std::vector<std::size_t> selected;  // best arms by validation loss, at most two
  Checkpoint merged;
};

struct SweepOptions {
  /// Steps per arm; 0 means one pass over the training data.
  std::size_t steps = 0;
  double merge_weight = 0.5;
};

/// One run per learning rate from the same initial weights; arm i orders
/// data and draws dropout from a seed derived from the base seed and i.
/// Diverging arms are marked failed. The two arms with the lowest
/// validation loss are merged (a single surviving arm is used as is).
/// Throws std::runtime_error when every arm fails.
SweepResult lr_sweep(const PipelineConfig& base, const Checkpoint* backbone,
                     const std::vector<Sample>& train, const std::vector<Sample>& validation,
                     const SweepOptions& options = {});

}  // namespace lvlm
