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

#include "lvlm/pipeline/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {

template <typename T>
GateStats gate_stats(const BasicTensor<T>& gate) {
  GateStats s;
  if (!gate.defined()) return s;
  s.count = gate.numel();
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (T v : gate.data()) {
    total += v;
    s.min = std::min<double>(s.min, v);
    s.max = std::max<double>(s.max, v);
  }
  s.mean = total / static_cast<double>(s.count);
  return s;
}

namespace {

std::string describe_non_finite(double loss, const GateStats& g) {
  std::ostringstream os;
  os << "non-finite loss " << loss << "; gate mean " << g.mean << " min " << g.min << " max "
     << g.max << " over " << g.count << " entries";
  return os.str();
}

}  // namespace

NonFiniteLossError::NonFiniteLossError(double loss, GateStats gate)
    : std::runtime_error(describe_non_finite(loss, gate)), loss_(loss), gate_(gate) {}

std::vector<int> with_eos(std::span<const int> labels) {
  std::vector<int> out(labels.begin(), labels.end());
  out.push_back(tokens::kEos);
  return out;
}

template <typename T>
Pipeline<T>::Pipeline(PipelineConfig cfg)
    : cfg_(std::move(cfg)),
      model_(std::make_unique<VlmModel<T>>(cfg_.model, cfg_.seed, uses_reasoner_mlp(cfg_.variant))) {}

template <typename T>
SecondPassImages Pipeline<T>::answer_images() const {
  switch (cfg_.variant) {
    case Variant::NoOriginalImage: return SecondPassImages::ReasonedOnly;
    case Variant::DuplicateImageBaseline: return SecondPassImages::OriginalTwice;
    case Variant::PlainBaseline: return SecondPassImages::OriginalOnly;
    default: return SecondPassImages::OriginalAndReasoned;
  }
}

template <typename T>
PassTrace<T> Pipeline<T>::run(const ImageGrid& image, std::span<const int> query,
                              std::span<const int> labels, bool training, Rng& rng) const {
  const auto& m = *model_;
  const auto ordering = cfg_.effective_ordering();
  const std::size_t image_tokens = cfg_.model.num_image_tokens();
  PassTrace<T> t;

  auto pe = m.encoder.embed_patches(image);
  t.first_features = m.encoder.encode(pe);
  auto original = m.encoder.merge_patches(t.first_features);
  t.answer_layout = answer_layout(query, labels, image_tokens, ordering, answer_images());

  if (is_baseline(cfg_.variant)) {
    t.images.assign(t.answer_layout.spans.size(), original);
  } else {
    t.first_layout = first_pass_layout(query, image_tokens, ordering);
    auto first = m.lm.forward(t.first_layout, {original}, LoraGate::Enabled,
                              /*compute_logits=*/false);
    t.hint = extract_hint(first.hidden, t.first_layout);
    auto r = m.reasoner.reason_traced(t.hint, training, rng);
    t.reasoned = r.output;
    t.gate = r.gate;
    if (hooks.on_reason) hooks.on_reason(t.hint, t.reasoned);
    t.delta = m.reasoner.unmerge(t.reasoned, cfg_.model.num_patches());
    t.second_features = m.encoder.encode(pe, &t.delta);
    auto reasoned_tokens = m.encoder.merge_patches(t.second_features);
    for (const auto& s : t.answer_layout.spans)
      t.images.push_back(s.source == SpanSource::Original ? original : reasoned_tokens);
  }
  if (hooks.on_second_pass_layout) hooks.on_second_pass_layout(t.answer_layout);
  // The answer pass always runs the base language model.
  t.hidden = m.lm.forward(t.answer_layout, t.images, LoraGate::Disabled, /*compute_logits=*/false)
                 .hidden;
  return t;
}

template <typename T>
BasicTensor<T> Pipeline<T>::label_logits(const PassTrace<T>& trace) const {
  const auto& layout = trace.answer_layout;
  const std::size_t n = layout.label_count();
  if (n == 0) throw ContractError("label_logits: layout has no labels");
  // Position i predicts token i + 1; the first predictor is kAnswer.
  return model_->lm.head(slice_rows(trace.hidden, layout.label_start - 1, n));
}

template <typename T>
BasicTensor<T> Pipeline<T>::loss(const Sample& sample, bool training, Rng& rng,
                                 PassTrace<T>* trace) const {
  if (sample.label.empty()) throw ContractError("training sample has no label tokens");
  const auto targets = with_eos(sample.label);
  auto t = run(sample.image, sample.query, targets, training, rng);
  auto l = softmax_ce(label_logits(t), std::span<const int>(targets));
  if (trace) *trace = std::move(t);
  return l;
}

template <typename T>
TrainStepResult<T> Pipeline<T>::train_step(const Sample& sample, AdamW<T>& optimizer, Rng& rng) {
  PassTrace<T> trace;
  auto l = loss(sample, /*training=*/true, rng, &trace);
  TrainStepResult<T> r;
  r.loss = static_cast<double>(l.item());
  r.gate = gate_stats(trace.gate);
  if (!std::isfinite(r.loss)) throw NonFiniteLossError(r.loss, r.gate);
  backward(l);
  for (const auto& e : model_->params.entries()) {
    if (!e.tensor.requires_grad()) continue;
    double sq = 0.0;
    for (T g : e.tensor.grad()) sq += static_cast<double>(g) * g;
    r.grad_norms[e.partition] += sq;
  }
  for (auto& [p, v] : r.grad_norms) v = std::sqrt(v);
  optimizer.step();
  optimizer.zero_grad();
  return r;
}

template <typename T>
InferResult<T> Pipeline<T>::infer(const ImageGrid& image, std::span<const int> query,
                                  std::size_t max_new) const {
  NoGradGuard no_grad;
  Rng unused(0);
  auto t = run(image, query, {}, /*training=*/false, unused);
  InferResult<T> r;
  r.gate = gate_stats(t.gate);
  r.tokens = greedy_decode(model_->lm, t.answer_layout, t.images, max_new, LoraGate::Disabled);
  return r;
}

template GateStats gate_stats(const BasicTensor<float>&);
template GateStats gate_stats(const BasicTensor<double>&);
template class Pipeline<float>;
template class Pipeline<double>;

}  // namespace lvlm
