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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lvlm/vision/image.hpp"

namespace lvlm {

enum class Task { Vqa, Mcq, Describe, Navigate };

std::string_view task_name(Task t);
std::optional<Task> parse_task(std::string_view name);

/// One training or evaluation item. Labels exclude the end token, which the
/// pipeline appends.
struct Sample {
  ImageGrid image;
  std::vector<int> query;
  std::vector<int> label;
  Task task = Task::Vqa;
  /// Multiple-choice items: exactly four options and the correct index.
  std::vector<std::string> options;
  int correct_option = -1;

  bool operator==(const Sample&) const = default;
};

}  // namespace lvlm
