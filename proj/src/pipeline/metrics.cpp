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

#include "lvlm/pipeline/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {

std::string metric_json(const MetricRecord& r) {
  nlohmann::json j = {{"variant", r.variant}, {"benchmark", r.benchmark}, {"metric", r.metric},
                      {"step", r.step},       {"seed", r.seed}};
  if (std::isfinite(r.value)) j["value"] = r.value;
  else j["value"] = nullptr;
  return j.dump();
}

void write_metrics(const std::filesystem::path& path, const std::vector<MetricRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& r : records) out << metric_json(r) << '\n';
  if (!out) throw InputError("write failed for " + path.string());
}

std::vector<MetricRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::vector<MetricRecord> out;
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      MetricRecord r;
      r.variant = j.at("variant").get<std::string>();
      r.benchmark = j.at("benchmark").get<std::string>();
      r.metric = j.at("metric").get<std::string>();
      r.value = j.at("value").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                        : j.at("value").get<double>();
      r.step = j.at("step").get<std::uint64_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace lvlm
