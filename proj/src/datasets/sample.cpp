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

#include "lvlm/datasets/sample.hpp"

namespace lvlm {

std::string_view task_name(Task t) {
  switch (t) {
    case Task::Vqa: return "vqa";
    case Task::Mcq: return "mcq";
    case Task::Describe: return "describe";
    case Task::Navigate: return "navigate";
  }
  return "unknown";
}

std::optional<Task> parse_task(std::string_view name) {
  for (auto t : {Task::Vqa, Task::Mcq, Task::Describe, Task::Navigate})
    if (task_name(t) == name) return t;
  return std::nullopt;
}

}  // namespace lvlm
