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

#include <iosfwd>
#include <string>
#include <vector>

namespace lvlm::cli {

/// Process exit codes.
enum class ExitCode : int { Ok = 0, CheckFailed = 1, Usage = 2, Runtime = 3 };

/// Runs one subcommand (pretrain, train, eval, ablate, merge, gradcheck,
/// datagen). `args` excludes the program name. Progress goes to `out`,
/// diagnostics to `err`. Every file written lands under --out, and the
/// files depend only on the config, the seed and the inputs they name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lvlm::cli
