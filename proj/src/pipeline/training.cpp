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

#include "lvlm/pipeline/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {
namespace {

constexpr std::array<SecondPassImages, 2> kBackboneImages = {SecondPassImages::OriginalOnly,
                                                             SecondPassImages::OriginalTwice};
constexpr std::array<Ordering, 2> kOrderings = {Ordering::ImageFirst, Ordering::PromptFirst};

// Calls f(sample) over `steps` steps, reshuffling at every epoch boundary.
template <typename F, typename E>
void for_each_step(std::size_t n, std::size_t steps, const Rng& order_rng, F&& f, E&& end_of_epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t pos = step % n;
    if (pos == 0) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      auto r = order_rng.split(step / n);
      r.shuffle(order.begin(), order.end());
    }
    f(step, order[pos]);
    if (pos + 1 == n || step + 1 == steps) end_of_epoch(step);
  }
}

}  // namespace

double TrainLog::recent_loss(std::size_t window) const {
  if (losses.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t k = std::min(window, losses.size());
  return std::accumulate(losses.end() - static_cast<std::ptrdiff_t>(k), losses.end(), 0.0) /
         static_cast<double>(k);
}

std::uint64_t checkpoint_hash(const ModelConfig& cfg) { return cfg.hash(); }

std::unique_ptr<Pipeline<float>> build_pipeline(const PipelineConfig& cfg, const Checkpoint* backbone) {
  auto p = std::make_unique<Pipeline<float>>(cfg);
  if (backbone) {
    if (backbone->config_hash != checkpoint_hash(cfg.model))
      throw CheckpointError("backbone checkpoint was written for a different model config");
    restore_checkpoint(p->model().params, *backbone, is_backbone);
  }
  return p;
}

TrainLog train_reasoner(Pipeline<float>& pipeline, const std::vector<Sample>& data,
                        const TrainOptions& options) {
  TrainLog log;
  if (is_baseline(pipeline.variant())) return log;
  if (data.empty()) throw ContractError("train_reasoner: empty training set");
  auto& params = pipeline.model().params;
  set_trainable_partition(params, TrainingStage::Reasoner);
  AdamW<float> opt(params.trainable(), pipeline.config().optimizer);
  const Rng root(options.seed);
  Rng dropout = root.split("dropout");
  const std::size_t steps = options.steps ? options.steps : data.size();
  const auto hash = checkpoint_hash(pipeline.config().model);

  auto emit = [&](std::size_t done) {
    if (options.on_checkpoint) options.on_checkpoint(capture_checkpoint(params, hash, done, &opt));
  };
  for_each_step(
      data.size(), steps, root.split("order"),
      [&](std::size_t step, std::size_t index) {
        auto r = pipeline.train_step(data[index], opt, dropout);
        log.losses.push_back(r.loss);
        log.steps = step + 1;
        if (options.checkpoint_every && log.steps % options.checkpoint_every == 0 &&
            log.steps % data.size() != 0 && log.steps != steps)
          emit(log.steps);
      },
      [&](std::size_t step) { emit(step + 1); });
  return log;
}

template <typename T>
BasicTensor<T> backbone_loss(const VlmModel<T>& model, const Sample& sample, SecondPassImages images,
                             Ordering ordering, std::optional<std::size_t> blank_span) {
  if (images != SecondPassImages::OriginalOnly && images != SecondPassImages::OriginalTwice)
    throw ContractError("backbone_loss: only original-image layouts are single-pass");
  if (sample.label.empty()) throw ContractError("training sample has no label tokens");
  const auto targets = with_eos(sample.label);
  auto image_tokens = model.encoder.merge_patches(model.encoder.encode(model.encoder.embed_patches(sample.image)));
  auto layout = answer_layout(sample.query, targets, model.config().num_image_tokens(), ordering, images);
  std::vector<BasicTensor<T>> blocks(layout.spans.size(), image_tokens);
  if (blank_span) {
    if (*blank_span >= blocks.size()) throw ContractError("backbone_loss: blank span out of range");
    const auto& img = sample.image;
    blocks[*blank_span] = model.encoder.merge_patches(model.encoder.encode(
        model.encoder.embed_patches(ImageGrid::blank(img.height, img.width, img.channels))));
  }
  auto out = model.lm.forward(layout, blocks, LoraGate::Disabled, /*compute_logits=*/false);
  auto logits = model.lm.head(slice_rows(out.hidden, layout.label_start - 1, layout.label_count()));
  return softmax_ce(logits, std::span<const int>(targets));
}

TrainLog pretrain_backbone(VlmModel<float>& model, const std::vector<Sample>& data,
                           const PretrainOptions& options) {
  if (data.empty()) throw ContractError("pretrain_backbone: empty training set");
  if (options.batch == 0) throw ContractError("pretrain_backbone: batch must be positive");
  set_trainable_partition(model.params, TrainingStage::Backbone);
  AdamW<float> opt(model.params.trainable(), options.optimizer);
  const Rng root(options.seed);
  Rng layout_rng = root.split("layout");
  const float inv_batch = 1.0f / static_cast<float>(options.batch);
  TrainLog log;
  double batch_loss = 0.0;
  for_each_step(
      data.size(), options.steps * options.batch, root.split("order"),
      [&](std::size_t draw, std::size_t index) {
        const auto images = kBackboneImages[layout_rng.below(2)];
        const auto ordering = kOrderings[layout_rng.below(2)];
        std::optional<std::size_t> blank;
        if (images == SecondPassImages::OriginalTwice && layout_rng.uniform() < options.blank_probability)
          blank = static_cast<std::size_t>(layout_rng.below(2));
        auto l = backbone_loss(model, data[index], images, ordering, blank);
        const double v = l.item();
        if (!std::isfinite(v)) throw NonFiniteLossError(v, GateStats{});
        backward(scale(l, inv_batch));
        batch_loss += v;
        if ((draw + 1) % options.batch != 0) return;
        opt.step();
        opt.zero_grad();
        log.losses.push_back(batch_loss * inv_batch);
        log.steps = (draw + 1) / options.batch;
        batch_loss = 0.0;
      },
      [](std::size_t) {});
  set_trainable_partition(model.params, TrainingStage::Reasoner);
  return log;
}

template <typename T>
double mean_loss(const Pipeline<T>& pipeline, const std::vector<Sample>& data) {
  if (data.empty()) throw ContractError("mean_loss: empty data");
  NoGradGuard no_grad;
  Rng unused(0);
  double total = 0.0;
  for (const auto& s : data) total += static_cast<double>(pipeline.loss(s, false, unused).item());
  return total / static_cast<double>(data.size());
}

double mean_backbone_loss(const VlmModel<float>& model, const std::vector<Sample>& data) {
  if (data.empty()) throw ContractError("mean_backbone_loss: empty data");
  NoGradGuard no_grad;
  double total = 0.0;
  for (const auto& s : data)
    for (auto images : kBackboneImages)
      for (auto ordering : kOrderings) total += backbone_loss(model, s, images, ordering).item();
  return total / static_cast<double>(4 * data.size());
}

std::array<double, 7> sweep_learning_rates() {
  std::array<double, 7> lrs{};
  for (std::size_t i = 0; i < lrs.size(); ++i)
    lrs[i] = std::pow(10.0, -2.0 - 0.5 * static_cast<double>(i));
  return lrs;
}

SweepResult lr_sweep(const PipelineConfig& base, const Checkpoint* backbone,
                     const std::vector<Sample>& train, const std::vector<Sample>& validation,
                     const SweepOptions& options) {
  if (is_baseline(base.variant)) throw ContractError("lr_sweep: baselines are not trained");
  SweepResult result;
  const auto lrs = sweep_learning_rates();
  const Rng arm_seeds = Rng(base.seed).split("sweep");
  for (std::size_t i = 0; i < lrs.size(); ++i) {
    SweepArm arm;
    arm.lr = lrs[i];
    arm.seed = arm_seeds.split(i).next_u64();
    PipelineConfig cfg = base;
    cfg.optimizer.lr = arm.lr;
    auto pipeline = build_pipeline(cfg, backbone);
    try {
      TrainOptions to;
      to.steps = options.steps;
      to.seed = arm.seed;
      to.checkpoint_every = 0;
      auto log = train_reasoner(*pipeline, train, to);
      arm.train_loss = log.recent_loss();
      arm.validation_loss = mean_loss(*pipeline, validation);
      if (!std::isfinite(arm.validation_loss)) throw NonFiniteLossError(arm.validation_loss, {});
      arm.checkpoint = capture_checkpoint(pipeline->model().params, checkpoint_hash(cfg.model),
                                          log.steps);
    } catch (const NonFiniteLossError& e) {
      arm.failed = true;
      arm.error = e.what();
    }
    result.arms.push_back(std::move(arm));
  }

  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < result.arms.size(); ++i)
    if (!result.arms[i].failed) ok.push_back(i);
  if (ok.empty()) throw std::runtime_error("lr_sweep: every learning rate diverged");
  std::stable_sort(ok.begin(), ok.end(), [&](std::size_t a, std::size_t b) {
    return result.arms[a].validation_loss < result.arms[b].validation_loss;
  });
  ok.resize(std::min<std::size_t>(ok.size(), 2));
  result.selected = ok;
  result.merged = ok.size() == 2 ? merge_checkpoints(*result.arms[ok[0]].checkpoint,
                                                     *result.arms[ok[1]].checkpoint,
                                                     options.merge_weight)
                                 : *result.arms[ok[0]].checkpoint;
  return result;
}

template BasicTensor<float> backbone_loss(const VlmModel<float>&, const Sample&, SecondPassImages,
                                          Ordering, std::optional<std::size_t>);
template BasicTensor<double> backbone_loss(const VlmModel<double>&, const Sample&, SecondPassImages,
                                           Ordering, std::optional<std::size_t>);
template double mean_loss(const Pipeline<float>&, const std::vector<Sample>&);
template double mean_loss(const Pipeline<double>&, const std::vector<Sample>&);

}  // namespace lvlm
