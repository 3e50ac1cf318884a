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

#include "lvlm/pipeline/corpus.hpp"

#include <algorithm>

#include "lvlm/datasets/mcq.hpp"
#include "lvlm/datasets/scene.hpp"
#include "lvlm/navsim/navsim.hpp"

namespace lvlm {

std::vector<Sample> make_corpus(std::uint64_t seed, const CorpusSpec& spec, const Vocabulary& vocab) {
  const Rng root(seed);
  std::vector<std::vector<Sample>> by_task(5);

  const auto vqa = root.split("vqa");
  for (std::size_t i = 0; i < spec.vqa; ++i)
    by_task[0].push_back(scene_vqa_sample(gen_scene(vqa.split(i)), vocab));

  const auto describe = root.split("describe");
  SceneSpec small;
  small.max_objects = 3;
  for (std::size_t i = 0; i < spec.describe; ++i)
    by_task[1].push_back(scene_describe_sample(gen_scene(describe.split(i), small), vocab));

  const auto nav = root.split("navigate");
  for (std::size_t i = 0; i < spec.navigate; ++i)
    by_task[2].push_back(navigation_sample(nav.split(i), vocab));

  if (spec.mcq > 0) {
    const std::size_t events = std::max<std::size_t>(188, (spec.mcq + 1) / 2);
    const auto captions = generate_hri_captions(root.split("captions"), events);
    const auto items = build_mcq(captions, root.split("mcq"));
    for (std::size_t i = 0; i < spec.mcq; ++i)
      by_task[3].push_back(mcq_sample(items[i], render_event(captions, items[i].event_id), vocab));
  }

  const auto grounding = root.split("grounding");
  SceneSpec single;
  single.min_objects = 1;
  single.max_objects = 1;
  for (std::size_t i = 0; i < spec.grounding; ++i)
    by_task[4].push_back(scene_vqa_sample(gen_scene(grounding.split(i), single), vocab));

  std::vector<Sample> out;
  out.reserve(spec.total());
  const std::size_t longest = std::max({spec.vqa, spec.describe, spec.navigate, spec.mcq, spec.grounding});
  for (std::size_t i = 0; i < longest; ++i)
    for (auto& task : by_task)
      if (i < task.size()) out.push_back(std::move(task[i]));
  return out;
}

}  // namespace lvlm
