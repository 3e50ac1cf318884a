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

// Binary checkpoint layout (all integers little-endian):
//
//   "LVLM" | u32 version | u64 config hash | u64 step | u32 flags
//   u32 tensor count, then per tensor:
//     u32 name length | name bytes | u32 rank | u64 extents... | f32 values...
//   if flags & 1: u64 optimizer step, then first- and second-moment tables
//   in the tensor-table format.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lvlm/model/params.hpp"
#include "lvlm/numerics/adamw.hpp"

namespace lvlm {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when two checkpoints cannot be interpolated.
class MergeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NamedTensor {
  std::string name;
  Shape shape;
  std::vector<float> values;
  bool operator==(const NamedTensor&) const = default;
};

struct OptimizerState {
  std::uint64_t step = 0;
  std::vector<NamedTensor> first_moment;
  std::vector<NamedTensor> second_moment;
  bool operator==(const OptimizerState&) const = default;
};

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t version = kVersion;
  std::uint64_t config_hash = 0;
  std::uint64_t step = 0;
  std::vector<NamedTensor> tensors;
  std::optional<OptimizerState> optimizer;

  const NamedTensor* find(const std::string& name) const;
  bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

/// Reads a checkpoint. When `expected_hash` is given and differs from the
/// stored hash, throws CheckpointError unless `force`.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::uint64_t> expected_hash = std::nullopt,
                           bool force = false);

/// Snapshot of every tensor in `params` (and optimizer moments, keyed by
/// the owning parameter's name, when given).
template <typename T>
Checkpoint capture_checkpoint(const ParamStore<T>& params, std::uint64_t config_hash,
                              std::uint64_t step, const AdamW<T>* optimizer = nullptr);

/// Copies checkpoint values into the store for every entry whose partition
/// passes `select`. Every selected store entry must be present with the
/// same shape.
template <typename T>
void restore_checkpoint(ParamStore<T>& params, const Checkpoint& ckpt,
                        const std::function<bool(Partition)>& select = nullptr);

/// Restores the optimizer's moments and step from `ckpt.optimizer`.
template <typename T>
void restore_optimizer(AdamW<T>& optimizer, const ParamStore<T>& params, const Checkpoint& ckpt);

/// Elementwise weight·a + (1 − weight)·b over every tensor, evaluated in
/// 64-bit and rounded once. Optimizer state survives only when both sides
/// carry the same state, so merge(a, a) == a. Throws MergeError
/// for differing config hashes or tensor tables, or weight outside [0, 1].
Checkpoint merge_checkpoints(const Checkpoint& a, const Checkpoint& b, double weight = 0.5);

}  // namespace lvlm
