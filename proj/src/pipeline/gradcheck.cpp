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

#include "lvlm/pipeline/gradcheck.hpp"

#include <algorithm>

#include "lvlm/lm/layout.hpp"
#include "lvlm/pipeline/pipeline.hpp"

namespace lvlm {

template <typename T>
FullGraphGradCheck full_graph_grad_check(std::uint64_t seed, double eps, double floor) {
  PipelineConfig pc;
  pc.model = ModelConfig::micro();
  pc.seed = seed;
  Pipeline<double> oracle(pc);
  Pipeline<T> subject(pc);

  Rng rng = Rng(seed).split("gradcheck");
  auto& op = oracle.model().params;
  for (const auto& e : op.entries()) {
    auto t = e.tensor;
    const bool gain = e.name.ends_with(".gain");
    for (auto& v : t.mutable_data()) v = gain ? 1.0 + 0.1 * rng.normal() : 0.5 * rng.normal();
  }
  subject.model().params.copy_values_from(op);
  op.copy_values_from(subject.model().params);

  const auto& mc = pc.model;
  Sample sample;
  sample.image = ImageGrid::blank(mc.image_height, mc.image_width, mc.channels);
  for (auto& p : sample.image.pixels) p = static_cast<float>(rng.uniform());
  const auto text_ids = mc.vocab - tokens::kNumSpecial;
  for (int i = 0; i < 4; ++i)
    sample.query.push_back(tokens::kNumSpecial + static_cast<int>(rng.below(text_ids)));
  for (int i = 0; i < 2; ++i)
    sample.label.push_back(tokens::kNumSpecial + static_cast<int>(rng.below(text_ids)));

  const Rng dropout_rng = Rng(seed).split("dropout");
  set_trainable_partition(subject.model().params, TrainingStage::Reasoner);
  {
    Rng r = dropout_rng;
    backward(subject.loss(sample, /*training=*/true, r));
  }

  FullGraphGradCheck out;
  NoGradGuard no_grad;
  for (const auto& e : subject.model().params.entries()) {
    if (e.partition != Partition::Reasoner && e.partition != Partition::Unmerger &&
        e.partition != Partition::Lora)
      continue;
    std::vector<double> analytic(e.tensor.numel(), 0.0);
    if (e.tensor.has_grad()) std::copy(e.tensor.grad().begin(), e.tensor.grad().end(), analytic.begin());

    auto target = op.get(e.name);
    std::vector<double> point(target.data().begin(), target.data().end());
    auto numeric = central_differences(
        [&](const std::vector<double>& p) {
          std::copy(p.begin(), p.end(), target.mutable_data().begin());
          Rng r = dropout_rng;
          return oracle.loss(sample, /*training=*/true, r).item();
        },
        point, eps);
    std::copy(point.begin(), point.end(), target.mutable_data().begin());

    auto res = compare_gradients(analytic, numeric, floor);
    out.coordinates += res.checked;
    out.max_rel_error = std::max(out.max_rel_error, res.max_rel_error);
    out.tensors.push_back({e.name, res});
  }
  return out;
}

template FullGraphGradCheck full_graph_grad_check<float>(std::uint64_t, double, double);
template FullGraphGradCheck full_graph_grad_check<double>(std::uint64_t, double, double);

}  // namespace lvlm
