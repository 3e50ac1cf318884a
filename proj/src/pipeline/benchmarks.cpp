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

#include "lvlm/pipeline/benchmarks.hpp"

#include "lvlm/numerics/errors.hpp"

namespace lvlm {

std::string_view benchmark_name(Benchmark b) {
  switch (b) {
    case Benchmark::Navigate: return "navigate";
    case Benchmark::Mcq: return "mcq";
    case Benchmark::Describe: return "describe";
  }
  return "?";
}

std::optional<Benchmark> parse_benchmark(std::string_view name) {
  for (auto b : kAllBenchmarks)
    if (benchmark_name(b) == name) return b;
  return std::nullopt;
}

std::string_view benchmark_metric(Benchmark b) {
  switch (b) {
    case Benchmark::Navigate: return "mean_final_distance";
    case Benchmark::Mcq: return "accuracy";
    case Benchmark::Describe: return "overlap_f1";
  }
  return "?";
}

std::size_t benchmark_max_new(Benchmark b) {
  switch (b) {
    case Benchmark::Navigate: return 8;
    case Benchmark::Mcq: return 4;
    case Benchmark::Describe: return 16;
  }
  return 0;
}

BenchmarkSuite make_benchmark_suite(std::uint64_t seed, const SuiteSpec& spec) {
  const Rng root(seed);
  BenchmarkSuite suite;
  const auto nav = root.split("navigate");
  for (std::size_t i = 0; i < spec.episodes; ++i) suite.episodes.push_back(sample_episode(nav.split(i)));
  if (spec.events > 0) {
    suite.captions = generate_hri_captions(root.split("captions"), spec.events);
    suite.mcq = build_mcq(suite.captions, root.split("mcq"));
  }
  const auto describe = root.split("describe");
  for (std::size_t i = 0; i < spec.describe; ++i) suite.describe.push_back(gen_scene(describe.split(i)));
  return suite;
}

NavPolicy pipeline_policy(const Pipeline<float>& pipeline, const Vocabulary& vocab) {
  return [&pipeline, &vocab](const Observation& obs, const NavState&) {
    const auto query = vocab.encode(obs.instruction);
    const auto out = pipeline.infer(obs.image, query, benchmark_max_new(Benchmark::Navigate));
    return vocab.decode(out.tokens);
  };
}

namespace {

void require(bool ok, Benchmark b) {
  if (!ok) throw ContractError("benchmark " + std::string(benchmark_name(b)) + " has no data");
}

}  // namespace

BenchmarkOutcome run_benchmark(const Pipeline<float>& pipeline, Benchmark b,
                               const BenchmarkSuite& suite, const Vocabulary& vocab) {
  BenchmarkOutcome out;
  out.benchmark = b;
  const std::size_t max_new = benchmark_max_new(b);
  switch (b) {
    case Benchmark::Navigate: {
      require(!suite.episodes.empty(), b);
      const auto policy = pipeline_policy(pipeline, vocab);
      for (const auto& ep : suite.episodes) out.episodes.push_back(run_episode(ep.start, ep.world, policy));
      out.value = mean_final_distance(out.episodes);
      out.count = out.episodes.size();
      break;
    }
    case Benchmark::Mcq: {
      require(!suite.mcq.empty(), b);
      std::size_t correct = 0;
      for (const auto& item : suite.mcq) {
        const auto sample = mcq_sample(item, render_event(suite.captions, item.event_id), vocab);
        const auto answer = pipeline.infer(sample.image, sample.query, max_new);
        if (score_mcq(vocab.decode(answer.tokens), item)) ++correct;
      }
      out.count = suite.mcq.size();
      out.value = static_cast<double>(correct) / static_cast<double>(out.count);
      break;
    }
    case Benchmark::Describe: {
      require(!suite.describe.empty(), b);
      double total = 0.0;
      for (const auto& qa : suite.describe) {
        const auto sample = scene_describe_sample(qa, vocab);
        const auto answer = pipeline.infer(sample.image, sample.query, max_new);
        total += overlap_score(vocab.decode(answer.tokens), describe_scene(qa.scene));
      }
      out.count = suite.describe.size();
      out.value = total / static_cast<double>(out.count);
      break;
    }
  }
  return out;
}

}  // namespace lvlm
