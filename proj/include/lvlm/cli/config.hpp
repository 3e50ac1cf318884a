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

// Run configuration: a flat text file of `key = value` lines. Blank lines
// and lines starting with '#' are ignored. Unknown keys, duplicate keys and
// values of the wrong type are ConfigErrors. Relative paths resolve against
// the working directory.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lvlm/model/config.hpp"
#include "lvlm/pipeline/benchmarks.hpp"
#include "lvlm/pipeline/corpus.hpp"
#include "lvlm/pipeline/variant.hpp"

namespace lvlm::cli {

struct RunConfig {
  // model: a preset plus optional overrides
  std::string model = "toy";  // toy | micro
  std::optional<std::size_t> d_llm, d_embed, lm_blocks, enc_blocks, lm_heads, enc_heads, vocab;
  std::optional<bool> lora;
  std::optional<std::size_t> lora_rank;
  std::optional<double> lora_alpha, dropout;

  Variant variant = Variant::FullMethod;
  std::optional<Ordering> ordering;
  double lr = 1e-3;
  bool sweep = false;
  std::size_t steps = 0;  // 0: one epoch
  std::size_t checkpoint_every = 200;
  std::size_t max_new_tokens = 12;

  std::size_t pretrain_steps = 4000;
  std::size_t pretrain_batch = 8;
  double pretrain_lr = 1e-3;
  double blank_probability = 0.5;

  std::optional<std::filesystem::path> train_data, validation_data, backbone, checkpoint,
      captions_data, mcq_data, merge_a, merge_b;
  double merge_weight = 0.5;
  bool force = false;  // accept checkpoints written for another config

  std::vector<Benchmark> benchmarks = {kAllBenchmarks.begin(), kAllBenchmarks.end()};
  std::size_t episodes = 16;
  std::size_t describe_samples = 64;

  CorpusSpec corpus{600, 300, 600, 300, 600};
  CorpusSpec validation_corpus{50, 25, 50, 25, 50};

  std::optional<std::uint64_t> seed;

  /// The preset with overrides applied. Changing d_llm or d_embed also
  /// resizes the matching feed-forward (4x) and key/value widths. Throws
  /// ConfigError for an unknown preset or a non-instantiable result.
  ModelConfig model_config() const;
};

/// Names accepted as config keys, in documentation order.
const std::vector<std::string_view>& config_keys();

RunConfig parse_config(std::string_view text);
/// Throws InputError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace lvlm::cli
