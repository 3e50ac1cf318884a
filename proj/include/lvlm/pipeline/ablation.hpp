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

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lvlm/pipeline/benchmarks.hpp"
#include "lvlm/pipeline/metrics.hpp"
#include "lvlm/pipeline/training.hpp"

namespace lvlm {

struct AblationOptions {
  /// Shared settings; the variant field is overwritten per row.
  PipelineConfig base;
  TrainOptions train;
  /// Called on each freshly built pipeline before training, e.g. to
  /// install hooks.
  std::function<void(Pipeline<float>&)> instrument;
};

struct AblationReport {
  /// Seven variants times three benchmarks, in kAllVariants x
  /// kAllBenchmarks order. A failed cell has value NaN.
  std::vector<MetricRecord> records;
  std::vector<std::pair<Variant, std::string>> failures;
};

/// Trains every feedback variant from the same backbone and seed (baselines
/// are evaluated untrained) and evaluates all benchmarks. A failure in one
/// variant or benchmark marks only its own cells.
AblationReport run_ablation_matrix(const AblationOptions& options, const Checkpoint& backbone,
                                   const std::vector<Sample>& train, const BenchmarkSuite& suite,
                                   const Vocabulary& vocab);

}  // namespace lvlm
