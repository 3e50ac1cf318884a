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

#include "lvlm/pipeline/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

namespace lvlm {
namespace {

constexpr char kMagic[4] = {'L', 'V', 'L', 'M'};
constexpr std::uint32_t kHasOptimizer = 1;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  void table(const std::vector<NamedTensor>& ts) {
    uint<std::uint32_t>(static_cast<std::uint32_t>(ts.size()));
    for (const auto& t : ts) {
      uint<std::uint32_t>(static_cast<std::uint32_t>(t.name.size()));
      bytes(t.name.data(), t.name.size());
      uint<std::uint32_t>(static_cast<std::uint32_t>(t.shape.size()));
      for (auto e : t.shape) uint<std::uint64_t>(e);
      for (float v : t.values) f32(v);
    }
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw CheckpointError("checkpoint truncated at byte " + std::to_string(pos_));
  }
  template <typename U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<NamedTensor> table() {
    const auto count = uint<std::uint32_t>();
    std::vector<NamedTensor> ts;
    for (std::uint32_t i = 0; i < count; ++i) {
      NamedTensor t;
      t.name = str(uint<std::uint32_t>());
      const auto rank = uint<std::uint32_t>();
      if (rank == 0 || rank > 8) throw CheckpointError("tensor '" + t.name + "' has invalid rank");
      for (std::uint32_t r = 0; r < rank; ++r) t.shape.push_back(uint<std::uint64_t>());
      const std::size_t n = shape_numel(t.shape);
      need(4 * n);
      t.values.resize(n);
      for (auto& v : t.values) v = f32();
      ts.push_back(std::move(t));
    }
    return ts;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

template <typename T>
NamedTensor snapshot(const std::string& name, const Shape& shape, std::span<const T> values) {
  return {name, shape, std::vector<float>(values.begin(), values.end())};
}

}  // namespace

const NamedTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, 4);
  w.uint<std::uint32_t>(ckpt.version);
  w.uint<std::uint64_t>(ckpt.config_hash);
  w.uint<std::uint64_t>(ckpt.step);
  w.uint<std::uint32_t>(ckpt.optimizer ? kHasOptimizer : 0);
  w.table(ckpt.tensors);
  if (ckpt.optimizer) {
    w.uint<std::uint64_t>(ckpt.optimizer->step);
    w.table(ckpt.optimizer->first_moment);
    w.table(ckpt.optimizer->second_moment);
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.str(4) != std::string(kMagic, 4)) throw CheckpointError("not a checkpoint (bad magic)");
  Checkpoint c;
  c.version = r.uint<std::uint32_t>();
  if (c.version != Checkpoint::kVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(c.version));
  c.config_hash = r.uint<std::uint64_t>();
  c.step = r.uint<std::uint64_t>();
  const auto flags = r.uint<std::uint32_t>();
  c.tensors = r.table();
  if (flags & kHasOptimizer) {
    OptimizerState s;
    s.step = r.uint<std::uint64_t>();
    s.first_moment = r.table();
    s.second_moment = r.table();
    c.optimizer = std::move(s);
  }
  if (!r.done()) throw CheckpointError("trailing bytes after checkpoint");
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("short write to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::uint64_t> expected_hash, bool force) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto c = deserialize_checkpoint(bytes);
  if (expected_hash && *expected_hash != c.config_hash && !force)
    throw CheckpointError("checkpoint " + path.string() + " was written for a different model config" +
                          " (hash " + std::to_string(c.config_hash) + ", expected " +
                          std::to_string(*expected_hash) + ")");
  return c;
}

template <typename T>
Checkpoint capture_checkpoint(const ParamStore<T>& params, std::uint64_t config_hash,
                              std::uint64_t step, const AdamW<T>* optimizer) {
  Checkpoint c;
  c.config_hash = config_hash;
  c.step = step;
  for (const auto& e : params.entries())
    c.tensors.push_back(snapshot<T>(e.name, e.tensor.shape(), e.tensor.data()));
  if (optimizer) {
    std::map<const void*, std::string> names;
    for (const auto& e : params.entries()) names[e.tensor.node()] = e.name;
    OptimizerState s;
    s.step = optimizer->step_count();
    const auto& ps = optimizer->params();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      auto it = names.find(ps[i].node());
      if (it == names.end()) throw CheckpointError("optimizer holds a tensor outside the store");
      s.first_moment.push_back(snapshot<T>(it->second, ps[i].shape(), optimizer->first_moment()[i]));
      s.second_moment.push_back(snapshot<T>(it->second, ps[i].shape(), optimizer->second_moment()[i]));
    }
    c.optimizer = std::move(s);
  }
  return c;
}

template <typename T>
void restore_checkpoint(ParamStore<T>& params, const Checkpoint& ckpt,
                        const std::function<bool(Partition)>& select) {
  for (const auto& e : params.entries()) {
    if (select && !select(e.partition)) continue;
    const auto* t = ckpt.find(e.name);
    if (!t) throw CheckpointError("checkpoint lacks tensor '" + e.name + "'");
    if (t->shape != e.tensor.shape())
      throw CheckpointError("tensor '" + e.name + "' has shape " + shape_str(t->shape) +
                            " in the checkpoint but " + shape_str(e.tensor.shape()) + " in the model");
    auto dst = e.tensor;
    auto out = dst.mutable_data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<T>(t->values[i]);
  }
}

template <typename T>
void restore_optimizer(AdamW<T>& optimizer, const ParamStore<T>& params, const Checkpoint& ckpt) {
  if (!ckpt.optimizer) throw CheckpointError("checkpoint has no optimizer state");
  std::map<const void*, std::string> names;
  for (const auto& e : params.entries()) names[e.tensor.node()] = e.name;
  auto lookup = [](const std::vector<NamedTensor>& table, const std::string& name) {
    for (const auto& t : table)
      if (t.name == name) return std::vector<T>(t.values.begin(), t.values.end());
    throw CheckpointError("optimizer state lacks '" + name + "'");
  };
  std::vector<std::vector<T>> m, v;
  for (const auto& p : optimizer.params()) {
    const auto& name = names.at(p.node());
    m.push_back(lookup(ckpt.optimizer->first_moment, name));
    v.push_back(lookup(ckpt.optimizer->second_moment, name));
  }
  optimizer.load_state(std::move(m), std::move(v), ckpt.optimizer->step);
}

Checkpoint merge_checkpoints(const Checkpoint& a, const Checkpoint& b, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0))
    throw MergeError("merge weight " + std::to_string(weight) + " outside [0, 1]");
  if (a.config_hash != b.config_hash) throw MergeError("checkpoints have different config hashes");
  if (a.tensors.size() != b.tensors.size())
    throw MergeError("checkpoints hold different tensor counts");
  Checkpoint out;
  out.config_hash = a.config_hash;
  out.step = std::max(a.step, b.step);
  out.tensors.reserve(a.tensors.size());
  for (std::size_t i = 0; i < a.tensors.size(); ++i) {
    const auto& ta = a.tensors[i];
    const auto& tb = b.tensors[i];
    if (ta.name != tb.name || ta.shape != tb.shape)
      throw MergeError("tensor tables differ at '" + ta.name + "' / '" + tb.name + "'");
    NamedTensor m{ta.name, ta.shape, std::vector<float>(ta.values.size())};
    for (std::size_t j = 0; j < m.values.size(); ++j)
      m.values[j] = static_cast<float>(weight * static_cast<double>(ta.values[j]) +
                                       (1.0 - weight) * static_cast<double>(tb.values[j]));
    out.tensors.push_back(std::move(m));
  }
  if (a.optimizer == b.optimizer) out.optimizer = a.optimizer;
  return out;
}

template Checkpoint capture_checkpoint(const ParamStore<float>&, std::uint64_t, std::uint64_t,
                                       const AdamW<float>*);
template Checkpoint capture_checkpoint(const ParamStore<double>&, std::uint64_t, std::uint64_t,
                                       const AdamW<double>*);
template void restore_checkpoint(ParamStore<float>&, const Checkpoint&,
                                 const std::function<bool(Partition)>&);
template void restore_checkpoint(ParamStore<double>&, const Checkpoint&,
                                 const std::function<bool(Partition)>&);
template void restore_optimizer(AdamW<float>&, const ParamStore<float>&, const Checkpoint&);
template void restore_optimizer(AdamW<double>&, const ParamStore<double>&, const Checkpoint&);

}  // namespace lvlm
