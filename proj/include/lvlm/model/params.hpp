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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lvlm/numerics/rng.hpp"
#include "lvlm/numerics/tensor.hpp"

namespace lvlm {

enum class Partition { Encoder, Projector, LanguageModel, Reasoner, Unmerger, Lora };

inline constexpr std::array<Partition, 6> kAllPartitions = {
    Partition::Encoder,  Partition::Projector, Partition::LanguageModel,
    Partition::Reasoner, Partition::Unmerger,  Partition::Lora};

std::string_view partition_name(Partition p);
/// Encoder, projector and language model: frozen while the reasoner trains.
bool is_backbone(Partition p);

/// Named parameter tensors tagged with the partition they belong to.
/// Registration order is stable and defines checkpoint order.
template <typename T>
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Partition partition;
    BasicTensor<T> tensor;
  };

  BasicTensor<T> add(std::string name, Partition partition, BasicTensor<T> tensor);

  bool contains(std::string_view name) const;
  const BasicTensor<T>& get(std::string_view name) const;
  const Entry& entry(std::string_view name) const;
  const std::vector<Entry>& entries() const { return entries_; }

  std::vector<BasicTensor<T>> tensors(Partition p) const;
  std::vector<BasicTensor<T>> trainable() const;
  std::size_t count(Partition p) const;
  std::size_t total_count() const;

  void clear_grads();

  /// Copies values by name from another store (possibly another precision).
  /// Names and shapes must match exactly.
  template <typename U>
  void copy_values_from(const ParamStore<U>& other) {
    if (other.entries().size() != entries_.size())
      throw DimensionError("parameter stores differ in tensor count");
    for (const auto& src : other.entries()) {
      auto& dst = entry_mut(src.name);
      if (dst.tensor.shape() != src.tensor.shape())
        throw DimensionError("parameter '" + src.name + "' shape mismatch");
      auto out = dst.tensor.mutable_data();
      auto in = src.tensor.data();
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<T>(in[i]);
    }
  }

 private:
  Entry& entry_mut(std::string_view name);

  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Normal(0, std) initialised tensor.
template <typename T>
BasicTensor<T> normal_tensor(Shape shape, double std, Rng& rng) {
  std::vector<T> v(shape_numel(shape));
  for (auto& x : v) x = static_cast<T>(std * rng.normal());
  return BasicTensor<T>(std::move(shape), std::move(v));
}

/// Which partitions receive gradient updates.
enum class TrainingStage {
  /// Backbone pretraining: encoder, projector and language model learn.
  Backbone,
  /// Reasoner training: backbone frozen; reasoner, unmerger, adapters learn.
  Reasoner,
};

struct PartitionReport {
  std::map<Partition, std::size_t> counts;
  std::vector<Partition> trainable;
  std::size_t trainable_count = 0;
  std::size_t total_count = 0;
};

/// Sets requires_grad on every tensor according to `stage` and reports
/// parameter counts per partition.
template <typename T>
PartitionReport set_trainable_partition(ParamStore<T>& params, TrainingStage stage);

}  // namespace lvlm
