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

#include "lvlm/numerics/adamw.hpp"

#include <cmath>
#include <string>

namespace lvlm {

template <typename T>
void adamw_update(std::span<T> param, std::span<const T> grad, std::span<T> m, std::span<T> v,
                  std::uint64_t t, const AdamWHyper& h) {
  if (m.size() != param.size() || v.size() != param.size() ||
      (!grad.empty() && grad.size() != param.size()))
    throw DimensionError("adamw: parameter, gradient and moment sizes disagree");
  if (t == 0) throw ContractError("adamw: step index starts at 1");
  const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(t));
  const double decay = 1.0 - h.lr * h.weight_decay;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad.empty() ? 0.0 : static_cast<double>(grad[i]);
    const double mi = h.beta1 * static_cast<double>(m[i]) + (1.0 - h.beta1) * g;
    const double vi = h.beta2 * static_cast<double>(v[i]) + (1.0 - h.beta2) * g * g;
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    const double mhat = mi / bc1;
    const double vhat = vi / bc2;
    double p = static_cast<double>(param[i]) * decay;
    p -= h.lr * mhat / (std::sqrt(vhat) + h.eps);
    param[i] = static_cast<T>(p);
  }
}

template <typename T>
AdamW<T>::AdamW(std::vector<BasicTensor<T>> params, AdamWHyper hyper)
    : params_(std::move(params)), hyper_(hyper) {
  for (const auto& p : params_) {
    m_.emplace_back(p.numel(), T(0));
    v_.emplace_back(p.numel(), T(0));
  }
}

template <typename T>
void AdamW<T>::step() {
  ++t_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    adamw_update<T>(p.mutable_data(), p.grad(), m_[i], v_[i], t_, hyper_);
  }
}

template <typename T>
void AdamW<T>::zero_grad() {
  for (auto& p : params_) p.clear_grad();
}

template <typename T>
void AdamW<T>::load_state(std::vector<std::vector<T>> m, std::vector<std::vector<T>> v,
                          std::uint64_t t) {
  if (m.size() != params_.size() || v.size() != params_.size())
    throw DimensionError("adamw: optimizer state has " + std::to_string(m.size()) +
                         " entries for " + std::to_string(params_.size()) + " parameters");
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (m[i].size() != params_[i].numel() || v[i].size() != params_[i].numel())
      throw DimensionError("adamw: moment shape mismatch at parameter " + std::to_string(i));
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = t;
}

template class AdamW<float>;
template class AdamW<double>;
template void adamw_update<float>(std::span<float>, std::span<const float>, std::span<float>,
                                  std::span<float>, std::uint64_t, const AdamWHyper&);
template void adamw_update<double>(std::span<double>, std::span<const double>, std::span<double>,
                                   std::span<double>, std::uint64_t, const AdamWHyper&);

}  // namespace lvlm
