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

#include "lvlm/pipeline/ablation.hpp"

#include <exception>
#include <limits>
#include <memory>

namespace lvlm {

AblationReport run_ablation_matrix(const AblationOptions& options, const Checkpoint& backbone,
                                   const std::vector<Sample>& train, const BenchmarkSuite& suite,
                                   const Vocabulary& vocab) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  AblationReport report;
  for (const auto variant : kAllVariants) {
    const std::string name(variant_name(variant));
    auto emit = [&](Benchmark b, double value, std::size_t step) {
      report.records.push_back(MetricRecord{name, std::string(benchmark_name(b)),
                                            std::string(benchmark_metric(b)), value, step,
                                            options.base.seed});
    };
    std::unique_ptr<Pipeline<float>> pipeline;
    std::size_t steps = 0;
    try {
      auto cfg = options.base;
      cfg.variant = variant;
      pipeline = build_pipeline(cfg, &backbone);
      if (options.instrument) options.instrument(*pipeline);
      steps = train_reasoner(*pipeline, train, options.train).steps;
    } catch (const std::exception& e) {
      report.failures.emplace_back(variant, e.what());
      for (auto b : kAllBenchmarks) emit(b, kNaN, steps);
      continue;
    }
    for (auto b : kAllBenchmarks) {
      try {
        emit(b, run_benchmark(*pipeline, b, suite, vocab).value, steps);
      } catch (const std::exception& e) {
        report.failures.emplace_back(variant, std::string(benchmark_name(b)) + ": " + e.what());
        emit(b, kNaN, steps);
      }
    }
  }
  return report;
}

}  // namespace lvlm
