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
#include <optional>
#include <string_view>
#include <vector>

#include "lvlm/datasets/mcq.hpp"
#include "lvlm/datasets/scene.hpp"
#include "lvlm/datasets/vocab.hpp"
#include "lvlm/navsim/navsim.hpp"
#include "lvlm/pipeline/pipeline.hpp"

namespace lvlm {

enum class Benchmark { Navigate, Mcq, Describe };

inline constexpr std::array<Benchmark, 3> kAllBenchmarks = {Benchmark::Navigate, Benchmark::Mcq,
                                                             Benchmark::Describe};

std::string_view benchmark_name(Benchmark b);
std::optional<Benchmark> parse_benchmark(std::string_view name);
/// "mean_final_distance", "accuracy" or "overlap_f1".
std::string_view benchmark_metric(Benchmark b);
/// Greedy decoding budget per answer.
std::size_t benchmark_max_new(Benchmark b);

struct SuiteSpec {
  std::size_t episodes = 16;
  std::size_t events = 188;  // two MCQ items each
  std::size_t describe = 64;
};

struct BenchmarkSuite {
  std::vector<Episode> episodes;
  std::vector<Caption> captions;
  std::vector<McqItem> mcq;
  std::vector<SceneQa> describe;
};

/// Held-out evaluation data; each benchmark draws from its own substream
/// of Rng(seed).
BenchmarkSuite make_benchmark_suite(std::uint64_t seed, const SuiteSpec& spec = {});

struct BenchmarkOutcome {
  Benchmark benchmark = Benchmark::Navigate;
  double value = 0.0;
  std::size_t count = 0;
  std::vector<EpisodeResult> episodes;  // navigation only
};

/// Navigation policy that asks the pipeline for an action on each
/// observation and returns the decoded text.
NavPolicy pipeline_policy(const Pipeline<float>& pipeline, const Vocabulary& vocab);

/// Runs one benchmark. Throws ContractError when the suite has no data for it.
BenchmarkOutcome run_benchmark(const Pipeline<float>& pipeline, Benchmark b,
                               const BenchmarkSuite& suite, const Vocabulary& vocab);

}  // namespace lvlm
