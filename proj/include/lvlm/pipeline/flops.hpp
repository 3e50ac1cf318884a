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

#include "lvlm/model/config.hpp"

namespace lvlm {

/// Text lengths that, with the config's image token count, determine the
/// sequence lengths of each pass.
struct SequenceLengths {
  std::size_t query_tokens = 8;
  std::size_t answer_tokens = 2;
};

/// Forward FLOPs of the matrix products (2·m·n·k each); softmax, norms and
/// elementwise work are ignored.
struct FlopReport {
  double encoder = 0;          // patch embedding + blocks, one image
  double merger = 0;           // one merge
  double baseline_lm = 0;      // [IMG][sep][query][ans][answer], all logits
  double pass1_lm = 0;         // [IMG][sep][query], no logits
  double reasoner = 0;
  double unmerger = 0;
  double pass2_encoder = 0;    // blocks only; patch embeddings are reused
  double pass2_lm = 0;         // [IMG][sep][IMG'][sep][query][ans][answer]

  double baseline = 0;
  double pass1 = 0;
  double pass2 = 0;
  double two_pass = 0;
  double ratio = 0;            // two_pass / baseline
  double reasoner_fraction = 0;  // (reasoner + unmerger) / two_pass
};

FlopReport flop_report(const ModelConfig& cfg, const SequenceLengths& lengths);

}  // namespace lvlm
