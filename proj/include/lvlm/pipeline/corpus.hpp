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
#include <cstdint>
#include <vector>

#include "lvlm/datasets/sample.hpp"
#include "lvlm/datasets/vocab.hpp"

namespace lvlm {

/// Per-task sample counts of a synthetic corpus.
struct CorpusSpec {
  std::size_t vqa = 0;
  std::size_t describe = 0;
  std::size_t navigate = 0;
  std::size_t mcq = 0;
  /// Single-object scene questions ("what color is the square ?").
  std::size_t grounding = 0;

  std::size_t total() const { return vqa + describe + navigate + mcq + grounding; }
};

/// Deterministic mixed-task corpus: relational scene questions, scene
/// descriptions, navigation observations labelled with the oracle action,
/// interaction multiple-choice items and single-object grounding questions.
/// Sample i of a task draws from Rng(seed).split(task).split(i); tasks are
/// interleaved round-robin. MCQ items are the first `mcq` items built from
/// at least 188 caption events, so small counts still draw distractors from
/// a full template pool.
std::vector<Sample> make_corpus(std::uint64_t seed, const CorpusSpec& spec, const Vocabulary& vocab);

}  // namespace lvlm
