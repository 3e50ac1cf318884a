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

// Finite-difference gradient verification.
//
// The analytic gradient comes from `backward` in the precision under test.
// The numeric gradient is always a central difference evaluated in 64-bit,
// so a 32-bit check measures the autodiff path rather than the rounding
// noise of a 32-bit difference quotient.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lvlm/numerics/ops.hpp"
#include "lvlm/numerics/tensor.hpp"

namespace lvlm {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  std::size_t checked = 0;
};

/// |a - n| / max(|a|, |n|, floor); zero when the two agree exactly.
inline double relative_error(double analytic, double numeric, double floor = 0.0) {
  const double diff = std::abs(analytic - numeric);
  if (diff == 0.0) return 0.0;
  return diff / std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline GradCheckResult compare_gradients(std::span<const double> analytic,
                                         std::span<const double> numeric, double floor = 0.0) {
  if (analytic.size() != numeric.size())
    throw DimensionError("compare_gradients: length mismatch");
  GradCheckResult r;
  r.checked = analytic.size();
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double e = relative_error(analytic[i], numeric[i], floor);
    if (i == 0 || e > r.max_rel_error) {
      r.max_rel_error = e;
      r.worst_index = i;
      r.analytic_at_worst = analytic[i];
      r.numeric_at_worst = numeric[i];
    }
  }
  return r;
}

/// Central differences of a scalar function of a flat parameter vector.
/// `f` receives the perturbed vector and returns a double.
template <typename F>
std::vector<double> central_differences(F&& f, std::vector<double> point, double eps) {
  std::vector<double> out(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + eps;
    const double hi = f(std::as_const(point));
    point[i] = saved - eps;
    const double lo = f(std::as_const(point));
    point[i] = saved;
    out[i] = (hi - lo) / (2.0 * eps);
  }
  return out;
}

/// Checks d f / d point. `f` must be callable with both BasicTensor<T> and
/// Tensor64 and return a one-element tensor of the same precision (a
/// generic lambda over ops.hpp functions satisfies this).
template <typename T, typename F>
GradCheckResult grad_check(F&& f, const BasicTensor<T>& point, double eps, double floor = 0.0) {
  BasicTensor<T> x(point.shape(), std::vector<T>(point.data().begin(), point.data().end()), true);
  auto y = f(x);
  backward(y);
  std::vector<double> analytic(x.numel(), 0.0);
  if (x.has_grad()) std::copy(x.grad().begin(), x.grad().end(), analytic.begin());

  NoGradGuard no_grad;
  std::vector<double> base(point.data().begin(), point.data().end());
  auto numeric = central_differences(
      [&](const std::vector<double>& p) { return f(Tensor64(point.shape(), p)).item(); },
      std::move(base), eps);
  return compare_gradients(analytic, numeric, floor);
}

}  // namespace lvlm
