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

#include "lvlm/model/params.hpp"

#include <algorithm>

namespace lvlm {

std::string_view partition_name(Partition p) {
  switch (p) {
    case Partition::Encoder: return "encoder";
    case Partition::Projector: return "projector";
    case Partition::LanguageModel: return "language_model";
    case Partition::Reasoner: return "reasoner";
    case Partition::Unmerger: return "unmerger";
    case Partition::Lora: return "lora";
  }
  return "unknown";
}

bool is_backbone(Partition p) {
  return p == Partition::Encoder || p == Partition::Projector || p == Partition::LanguageModel;
}

template <typename T>
BasicTensor<T> ParamStore<T>::add(std::string name, Partition partition, BasicTensor<T> tensor) {
  if (index_.count(name)) throw ContractError("duplicate parameter name '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), partition, tensor});
  return tensor;
}

template <typename T>
bool ParamStore<T>::contains(std::string_view name) const {
  return index_.find(name) != index_.end();
}

template <typename T>
const typename ParamStore<T>::Entry& ParamStore<T>::entry(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter '" + std::string(name) + "'");
  return entries_[it->second];
}

template <typename T>
typename ParamStore<T>::Entry& ParamStore<T>::entry_mut(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter '" + std::string(name) + "'");
  return entries_[it->second];
}

template <typename T>
const BasicTensor<T>& ParamStore<T>::get(std::string_view name) const {
  return entry(name).tensor;
}

template <typename T>
std::vector<BasicTensor<T>> ParamStore<T>::tensors(Partition p) const {
  std::vector<BasicTensor<T>> out;
  for (const auto& e : entries_)
    if (e.partition == p) out.push_back(e.tensor);
  return out;
}

template <typename T>
std::vector<BasicTensor<T>> ParamStore<T>::trainable() const {
  std::vector<BasicTensor<T>> out;
  for (const auto& e : entries_)
    if (e.tensor.requires_grad()) out.push_back(e.tensor);
  return out;
}

template <typename T>
std::size_t ParamStore<T>::count(Partition p) const {
  std::size_t n = 0;
  for (const auto& e : entries_)
    if (e.partition == p) n += e.tensor.numel();
  return n;
}

template <typename T>
std::size_t ParamStore<T>::total_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.numel();
  return n;
}

template <typename T>
void ParamStore<T>::clear_grads() {
  for (auto& e : entries_) e.tensor.clear_grad();
}

template <typename T>
PartitionReport set_trainable_partition(ParamStore<T>& params, TrainingStage stage) {
  PartitionReport report;
  for (auto p : kAllPartitions) report.counts[p] = params.count(p);
  for (auto p : kAllPartitions) {
    const bool train = stage == TrainingStage::Backbone ? is_backbone(p) : !is_backbone(p);
    if (train && report.counts[p] > 0) report.trainable.push_back(p);
  }
  for (const auto& e : params.entries()) {
    const bool train = std::find(report.trainable.begin(), report.trainable.end(),
                                 e.partition) != report.trainable.end();
    auto t = e.tensor;
    t.set_requires_grad(train);
    t.clear_grad();
    report.total_count += t.numel();
    if (train) report.trainable_count += t.numel();
  }
  return report;
}

template class ParamStore<float>;
template class ParamStore<double>;
template PartitionReport set_trainable_partition<float>(ParamStore<float>&, TrainingStage);
template PartitionReport set_trainable_partition<double>(ParamStore<double>&, TrainingStage);

}  // namespace lvlm
