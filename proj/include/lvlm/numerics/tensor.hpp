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

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape) noexcept;
std::string shape_str(const Shape& shape);

/// True unless a NoGradGuard is alive on this thread.
bool grad_mode_enabled() noexcept;

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard() noexcept;
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty == absent
  bool requires_grad = false;
  bool leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents that require grad.
  std::function<void(Node&)> backward;

  T* ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), T(0));
    return grad.data();
  }
};

}  // namespace detail

/// Dense row-major tensor participating in a reverse-mode graph.
///
/// A tensor is a shared handle: copies alias the same storage and graph
/// node. Operations in ops.hpp build new nodes whose parents are their
/// operands; `backward` walks the recorded graph from a scalar loss in
/// reverse topological order. Leaves with `requires_grad() == false` never
/// receive a gradient, which is how frozen parameters are expressed.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;
  using NodeType = detail::Node<T>;

  BasicTensor() = default;

  BasicTensor(Shape shape, std::vector<T> values, bool requires_grad = false)
      : node_(std::make_shared<NodeType>()) {
    if (shape.empty()) throw DimensionError("tensor shape must have at least one extent");
    for (auto e : shape)
      if (e == 0) throw DimensionError("tensor extents must be positive: " + shape_str(shape));
    if (shape_numel(shape) != values.size())
      throw DimensionError("tensor data length " + std::to_string(values.size()) +
                           " does not match shape " + shape_str(shape));
    node_->shape = std::move(shape);
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
  }

  static BasicTensor zeros(Shape shape, bool requires_grad = false) {
    auto n = shape_numel(shape);
    return BasicTensor(std::move(shape), std::vector<T>(n, T(0)), requires_grad);
  }
  static BasicTensor filled(Shape shape, T v) {
    auto n = shape_numel(shape);
    return BasicTensor(std::move(shape), std::vector<T>(n, v));
  }
  static BasicTensor scalar(T v, bool requires_grad = false) {
    return BasicTensor({1}, {v}, requires_grad);
  }

  bool defined() const noexcept { return static_cast<bool>(node_); }

  const Shape& shape() const { return node_->shape; }
  std::size_t dim() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->value.size(); }
  /// Leading extents collapsed: a [.., d] tensor viewed as rows of width d.
  std::size_t rows() const { return numel() / cols(); }
  std::size_t cols() const { return node_->shape.back(); }

  std::span<const T> data() const { return node_->value; }
  /// Direct storage access for initialisation and optimiser updates.
  std::span<T> mutable_data() { return node_->value; }
  T item() const {
    if (numel() != 1) throw ContractError("item() on tensor of shape " + shape_str(shape()));
    return node_->value[0];
  }
  T at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool is_leaf() const { return node_->leaf; }

  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  void clear_grad() { node_->grad.clear(); }

  /// Value copy with no graph history.
  BasicTensor detach() const { return BasicTensor(shape(), node_->value); }

  bool same_storage(const BasicTensor& other) const noexcept { return node_ == other.node_; }

  /// Builds a non-leaf result. Records parents and the backward closure
  /// only when grad mode is on and some parent requires grad.
  static BasicTensor make_result(Shape shape, std::vector<T> values,
                                 std::initializer_list<BasicTensor> parents,
                                 std::function<void(NodeType&)> backward) {
    return make_result(std::move(shape), std::move(values),
                       std::vector<BasicTensor>(parents), std::move(backward));
  }
  static BasicTensor make_result(Shape shape, std::vector<T> values,
                                 const std::vector<BasicTensor>& parents,
                                 std::function<void(NodeType&)> backward) {
    BasicTensor out(std::move(shape), std::move(values));
    out.node_->leaf = false;
    bool needs = false;
    if (grad_mode_enabled())
      for (const auto& p : parents) needs = needs || p.requires_grad();
    if (needs) {
      out.node_->requires_grad = true;
      out.node_->parents.reserve(parents.size());
      for (const auto& p : parents) out.node_->parents.push_back(p.node_);
      out.node_->backward = std::move(backward);
    }
    return out;
  }

  NodeType* node() const noexcept { return node_.get(); }

 private:
  std::shared_ptr<NodeType> node_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

/// Accumulates d(loss)/d(leaf) into every reachable leaf that requires
/// grad. Intermediate gradients are released afterwards.
template <typename T>
void backward(const BasicTensor<T>& loss) {
  if (!loss.defined() || loss.numel() != 1)
    throw ContractError("backward requires a scalar loss, got shape " +
                        (loss.defined() ? shape_str(loss.shape()) : std::string("<undefined>")));
  auto* root = loss.node();
  if (!root->requires_grad) return;

  // Iterative post-order DFS yields a topological order (parents first).
  std::vector<detail::Node<T>*> order;
  std::unordered_set<detail::Node<T>*> seen;
  std::vector<std::pair<detail::Node<T>*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      auto* p = node->parents[next++].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->ensure_grad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto* node = *it;
    if (node->leaf || node->grad.empty()) continue;
    node->backward(*node);
    node->grad.clear();
    node->grad.shrink_to_fit();
  }
}

}  // namespace lvlm
