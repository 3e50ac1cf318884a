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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lvlm {

/// One line of a metrics file. Non-finite values are written as null.
struct MetricRecord {
  std::string variant;
  std::string benchmark;
  std::string metric;
  double value = 0.0;
  std::uint64_t step = 0;
  std::uint64_t seed = 0;
  bool operator==(const MetricRecord&) const = default;
};

std::string metric_json(const MetricRecord& r);
void write_metrics(const std::filesystem::path& path, const std::vector<MetricRecord>& records);
std::vector<MetricRecord> read_metrics(const std::filesystem::path& path);

}  // namespace lvlm
