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

#include "lvlm/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace lvlm {
namespace {

template <typename T>
using Node = detail::Node<T>;

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
  if (a != b)
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                         shape_str(b));
}

void require_2d(const Shape& s, const char* op) {
  if (s.size() != 2)
    throw DimensionError(std::string(op) + ": expected a 2-d tensor, got " + shape_str(s));
}

// C[m,n] += A[m,k] · B[k,n]
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * n;
    const T* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      const T* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C[m,n] += A[m,k] · B[n,k]ᵀ
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  std::vector<T> bt(k * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t p = 0; p < k; ++p) bt[p * n + r] = b[r * k + p];
  gemm_nn(a, bt.data(), c, m, k, n);
}

// C[k,n] += A[m,k]ᵀ · B[m,n]
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    const T* brow = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      T* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
T gelu_scalar(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(std::numbers::sqrt2 / 2)));
}

template <typename T>
T gelu_grad_scalar(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x * T(std::numbers::sqrt2 / 2)));
  const T pdf = std::exp(T(-0.5) * x * x) * T(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
  return cdf + x * pdf;
}

template <typename T>
T sigmoid_scalar(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

}  // namespace

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "add");
  std::vector<T> out(a.numel());
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  auto* pa = a.node();
  auto* pb = b.node();
  return BasicTensor<T>::make_result(a.shape(), std::move(out), {a, b}, [pa, pb](Node<T>& self) {
    for (auto* p : {pa, pb}) {
      if (!p->requires_grad) continue;
      T* g = p->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename T>
BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "sub");
  std::vector<T> out(a.numel());
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  auto* pa = a.node();
  auto* pb = b.node();
  return BasicTensor<T>::make_result(a.shape(), std::move(out), {a, b}, [pa, pb](Node<T>& self) {
    if (pa->requires_grad) {
      T* g = pa->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
    if (pb->requires_grad) {
      T* g = pb->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "mul");
  std::vector<T> out(a.numel());
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  auto* pa = a.node();
  auto* pb = b.node();
  return BasicTensor<T>::make_result(a.shape(), std::move(out), {a, b}, [pa, pb](Node<T>& self) {
    const auto n = self.grad.size();
    if (pa->requires_grad) {
      T* g = pa->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[i] * pb->value[i];
    }
    if (pb->requires_grad) {
      T* g = pb->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[i] * pa->value[i];
    }
  });
}

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& v : out) v *= factor;
  auto* pa = a.node();
  return BasicTensor<T>::make_result(a.shape(), std::move(out), {a}, [pa, factor](Node<T>& self) {
    T* g = pa->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

template <typename T>
BasicTensor<T> add_bias(const BasicTensor<T>& x, const BasicTensor<T>& bias) {
  const std::size_t d = x.cols();
  if (bias.numel() != d)
    throw DimensionError("add_bias: bias " + shape_str(bias.shape()) + " does not match rows of " +
                         shape_str(x.shape()));
  std::vector<T> out(x.data().begin(), x.data().end());
  auto bv = bias.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i % d];
  auto* px = x.node();
  auto* pb = bias.node();
  return BasicTensor<T>::make_result(x.shape(), std::move(out), {x, bias},
                                     [px, pb, d](Node<T>& self) {
    if (px->requires_grad) {
      T* g = px->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
    if (pb->requires_grad) {
      T* g = pb->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i % d] += self.grad[i];
    }
  });
}

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_2d(a.shape(), "matmul");
  require_2d(b.shape(), "matmul");
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k)
    throw DimensionError("matmul: inner extents differ for " + shape_str(a.shape()) + " · " +
                         shape_str(b.shape()));
  std::vector<T> out(m * n, T(0));
  gemm_nn(a.data().data(), b.data().data(), out.data(), m, k, n);
  auto* pa = a.node();
  auto* pb = b.node();
  return BasicTensor<T>::make_result({m, n}, std::move(out), {a, b},
                                     [pa, pb, m, k, n](Node<T>& self) {
    if (pa->requires_grad) gemm_nt(self.grad.data(), pb->value.data(), pa->ensure_grad(), m, n, k);
    if (pb->requires_grad) gemm_tn(pa->value.data(), self.grad.data(), pb->ensure_grad(), m, k, n);
  });
}

template <typename T>
BasicTensor<T> matmul_nt(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_2d(b.shape(), "matmul_nt");
  const std::size_t k = a.cols();
  const std::size_t m = a.rows();
  const std::size_t n = b.shape()[0];
  if (b.shape()[1] != k)
    throw DimensionError("matmul_nt: inner extents differ for " + shape_str(a.shape()) + " · " +
                         shape_str(b.shape()) + "ᵀ");
  std::vector<T> out(m * n, T(0));
  gemm_nt(a.data().data(), b.data().data(), out.data(), m, k, n);
  Shape shape = a.shape();
  shape.back() = n;
  auto* pa = a.node();
  auto* pb = b.node();
  return BasicTensor<T>::make_result(std::move(shape), std::move(out), {a, b},
                                     [pa, pb, m, k, n](Node<T>& self) {
    if (pa->requires_grad) gemm_nn(self.grad.data(), pb->value.data(), pa->ensure_grad(), m, n, k);
    if (pb->requires_grad) gemm_tn(self.grad.data(), pa->value.data(), pb->ensure_grad(), m, n, k);
  });
}

template <typename T>
BasicTensor<T> gelu(const BasicTensor<T>& x) {
  std::vector<T> out(x.numel());
  auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = gelu_scalar(xv[i]);
  auto* px = x.node();
  return BasicTensor<T>::make_result(x.shape(), std::move(out), {x}, [px](Node<T>& self) {
    T* g = px->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      g[i] += self.grad[i] * gelu_grad_scalar(px->value[i]);
  });
}

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& x) {
  std::vector<T> out(x.numel());
  auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid_scalar(xv[i]);
  auto* px = x.node();
  return BasicTensor<T>::make_result(x.shape(), std::move(out), {x}, [px](Node<T>& self) {
    T* g = px->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const T y = self.value[i];
      g[i] += self.grad[i] * y * (T(1) - y);
    }
  });
}

template <typename T>
BasicTensor<T> softmax_rows(const BasicTensor<T>& x, bool causal) {
  const std::size_t d = x.cols();
  const std::size_t r = x.rows();
  if (causal && (x.dim() != 2 || r != d))
    throw DimensionError("softmax_rows: causal mask needs a square 2-d tensor, got " +
                         shape_str(x.shape()));
  std::vector<T> out(x.numel(), T(0));
  auto xv = x.data();
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t valid = causal ? i + 1 : d;
    const T* row = xv.data() + i * d;
    T* o = out.data() + i * d;
    T mx = -std::numeric_limits<T>::infinity();
    for (std::size_t j = 0; j < valid; ++j) mx = std::max(mx, row[j]);
    T total = 0;
    for (std::size_t j = 0; j < valid; ++j) {
      o[j] = std::exp(row[j] - mx);
      total += o[j];
    }
    for (std::size_t j = 0; j < valid; ++j) o[j] /= total;
  }
  auto* px = x.node();
  return BasicTensor<T>::make_result(x.shape(), std::move(out), {x}, [px, r, d](Node<T>& self) {
    T* g = px->ensure_grad();
    for (std::size_t i = 0; i < r; ++i) {
      const T* y = self.value.data() + i * d;
      const T* dy = self.grad.data() + i * d;
      T dot = 0;
      for (std::size_t j = 0; j < d; ++j) dot += y[j] * dy[j];
      for (std::size_t j = 0; j < d; ++j) g[i * d + j] += y[j] * (dy[j] - dot);
    }
  });
}

template <typename T>
BasicTensor<T> layernorm(const BasicTensor<T>& x, const BasicTensor<T>& gain,
                         const BasicTensor<T>& bias, double eps) {
  const std::size_t d = x.cols();
  const std::size_t r = x.rows();
  if (d < 2) throw DimensionError("layernorm: row width must be at least 2");
  if (gain.numel() != d || bias.numel() != d)
    throw DimensionError("layernorm: affine parameters must have width " + std::to_string(d));
  std::vector<T> out(x.numel());
  std::vector<T> xhat(x.numel());
  std::vector<T> rstd(r);
  auto xv = x.data();
  auto gv = gain.data();
  auto bv = bias.data();
  for (std::size_t i = 0; i < r; ++i) {
    const T* row = xv.data() + i * d;
    T mu = 0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= T(d);
    T var = 0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= T(d);
    rstd[i] = T(1) / std::sqrt(var + T(eps));
    for (std::size_t j = 0; j < d; ++j) {
      const T h = (row[j] - mu) * rstd[i];
      xhat[i * d + j] = h;
      out[i * d + j] = h * gv[j] + bv[j];
    }
  }
  auto* px = x.node();
  auto* pg = gain.node();
  auto* pb = bias.node();
  return BasicTensor<T>::make_result(
      x.shape(), std::move(out), {x, gain, bias},
      [px, pg, pb, r, d, xhat = std::move(xhat), rstd = std::move(rstd)](Node<T>& self) {
        const T* dy = self.grad.data();
        if (pg->requires_grad) {
          T* g = pg->ensure_grad();
          for (std::size_t i = 0; i < r * d; ++i) g[i % d] += dy[i] * xhat[i];
        }
        if (pb->requires_grad) {
          T* g = pb->ensure_grad();
          for (std::size_t i = 0; i < r * d; ++i) g[i % d] += dy[i];
        }
        if (px->requires_grad) {
          T* g = px->ensure_grad();
          std::vector<T> dxh(d);
          for (std::size_t i = 0; i < r; ++i) {
            T m1 = 0, m2 = 0;
            for (std::size_t j = 0; j < d; ++j) {
              dxh[j] = dy[i * d + j] * pg->value[j];
              m1 += dxh[j];
              m2 += dxh[j] * xhat[i * d + j];
            }
            m1 /= T(d);
            m2 /= T(d);
            for (std::size_t j = 0; j < d; ++j)
              g[i * d + j] += rstd[i] * (dxh[j] - m1 - xhat[i * d + j] * m2);
          }
        }
      });
}

template <typename T>
BasicTensor<T> dropout(const BasicTensor<T>& x, double p, bool training, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0))
    throw ConfigError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  if (!training || p == 0.0) return x;
  const T keep_scale = T(1.0 / (1.0 - p));
  std::vector<T> mask(x.numel());
  for (auto& m : mask) m = rng.uniform() >= p ? keep_scale : T(0);
  std::vector<T> out(x.numel());
  auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * mask[i];
  auto* px = x.node();
  return BasicTensor<T>::make_result(x.shape(), std::move(out), {x},
                                     [px, mask = std::move(mask)](Node<T>& self) {
    T* g = px->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * mask[i];
  });
}

template <typename T>
BasicTensor<T> softmax_ce(const BasicTensor<T>& logits, std::span<const int> targets,
                          std::span<const bool> ignore) {
  const std::size_t v = logits.cols();
  const std::size_t n = logits.rows();
  if (targets.size() != n)
    throw DimensionError("softmax_ce: " + std::to_string(targets.size()) + " targets for " +
                         std::to_string(n) + " rows");
  if (!ignore.empty() && ignore.size() != n)
    throw DimensionError("softmax_ce: ignore mask length does not match rows");
  std::vector<bool> active(n);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    active[i] = ignore.empty() || !ignore[i];
    if (!active[i]) continue;
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= v)
      throw ContractError("softmax_ce: target " + std::to_string(targets[i]) +
                          " outside vocabulary of size " + std::to_string(v));
    ++count;
  }
  if (count == 0) throw ContractError("softmax_ce: degenerate batch, every position is ignored");

  auto lv = logits.data();
  std::vector<T> probs(n * v, T(0));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    const T* row = lv.data() + i * v;
    T mx = *std::max_element(row, row + v);
    T z = 0;
    for (std::size_t j = 0; j < v; ++j) {
      probs[i * v + j] = std::exp(row[j] - mx);
      z += probs[i * v + j];
    }
    for (std::size_t j = 0; j < v; ++j) probs[i * v + j] /= z;
    total += static_cast<double>(mx + std::log(z) - row[targets[i]]);
  }
  const T loss = T(total / static_cast<double>(count));
  std::vector<int> tgt(targets.begin(), targets.end());
  auto* pl = logits.node();
  return BasicTensor<T>::make_result(
      {1}, {loss}, {logits},
      [pl, n, v, count, probs = std::move(probs), tgt = std::move(tgt),
       active = std::move(active)](Node<T>& self) {
        T* g = pl->ensure_grad();
        const T s = self.grad[0] / T(count);
        for (std::size_t i = 0; i < n; ++i) {
          if (!active[i]) continue;
          for (std::size_t j = 0; j < v; ++j) g[i * v + j] += s * probs[i * v + j];
          g[i * v + static_cast<std::size_t>(tgt[i])] -= s;
        }
      });
}

template <typename T>
BasicTensor<T> embedding(const BasicTensor<T>& table, std::span<const int> ids) {
  require_2d(table.shape(), "embedding");
  const std::size_t vocab = table.shape()[0];
  const std::size_t d = table.shape()[1];
  if (ids.empty()) throw DimensionError("embedding: empty id list");
  std::vector<T> out(ids.size() * d);
  auto tv = table.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab)
      throw ContractError("embedding: id " + std::to_string(ids[i]) + " outside table of " +
                          std::to_string(vocab) + " rows");
    std::copy_n(tv.begin() + ids[i] * d, d, out.begin() + i * d);
  }
  std::vector<int> idv(ids.begin(), ids.end());
  auto* pt = table.node();
  return BasicTensor<T>::make_result({ids.size(), d}, std::move(out), {table},
                                     [pt, d, idv = std::move(idv)](Node<T>& self) {
    T* g = pt->ensure_grad();
    for (std::size_t i = 0; i < idv.size(); ++i)
      for (std::size_t j = 0; j < d; ++j) g[idv[i] * d + j] += self.grad[i * d + j];
  });
}

template <typename T>
BasicTensor<T> slice_rows(const BasicTensor<T>& x, std::size_t start, std::size_t count) {
  require_2d(x.shape(), "slice_rows");
  const std::size_t d = x.cols();
  if (count == 0 || start + count > x.rows())
    throw DimensionError("slice_rows: rows [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") out of range for " +
                         shape_str(x.shape()));
  auto xv = x.data();
  std::vector<T> out(xv.begin() + start * d, xv.begin() + (start + count) * d);
  auto* px = x.node();
  return BasicTensor<T>::make_result({count, d}, std::move(out), {x},
                                     [px, start, d](Node<T>& self) {
    T* g = px->ensure_grad() + start * d;
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
  });
}

template <typename T>
BasicTensor<T> concat_rows(const std::vector<BasicTensor<T>>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t d = parts.front().cols();
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_2d(p.shape(), "concat_rows");
    if (p.cols() != d) throw DimensionError("concat_rows: width mismatch " + shape_str(p.shape()));
    total += p.rows();
  }
  std::vector<T> out;
  out.reserve(total * d);
  std::vector<Node<T>*> nodes;
  for (const auto& p : parts) {
    out.insert(out.end(), p.data().begin(), p.data().end());
    nodes.push_back(p.node());
  }
  return BasicTensor<T>::make_result({total, d}, std::move(out), parts,
                                     [nodes = std::move(nodes)](Node<T>& self) {
    std::size_t offset = 0;
    for (auto* p : nodes) {
      const std::size_t n = p->value.size();
      if (p->requires_grad) {
        T* g = p->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[offset + i];
      }
      offset += n;
    }
  });
}

template <typename T>
BasicTensor<T> slice_cols(const BasicTensor<T>& x, std::size_t start, std::size_t count) {
  require_2d(x.shape(), "slice_cols");
  const std::size_t d = x.cols();
  const std::size_t r = x.rows();
  if (count == 0 || start + count > d)
    throw DimensionError("slice_cols: columns out of range for " + shape_str(x.shape()));
  std::vector<T> out(r * count);
  auto xv = x.data();
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(xv.begin() + i * d + start, count, out.begin() + i * count);
  auto* px = x.node();
  return BasicTensor<T>::make_result({r, count}, std::move(out), {x},
                                     [px, start, count, d, r](Node<T>& self) {
    T* g = px->ensure_grad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < count; ++j) g[i * d + start + j] += self.grad[i * count + j];
  });
}

template <typename T>
BasicTensor<T> concat_cols(const std::vector<BasicTensor<T>>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t r = parts.front().rows();
  std::size_t width = 0;
  for (const auto& p : parts) {
    require_2d(p.shape(), "concat_cols");
    if (p.rows() != r) throw DimensionError("concat_cols: row mismatch " + shape_str(p.shape()));
    width += p.cols();
  }
  std::vector<T> out(r * width);
  std::vector<Node<T>*> nodes;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t c = p.cols();
    auto pv = p.data();
    for (std::size_t i = 0; i < r; ++i)
      std::copy_n(pv.begin() + i * c, c, out.begin() + i * width + offset);
    offset += c;
    nodes.push_back(p.node());
  }
  return BasicTensor<T>::make_result({r, width}, std::move(out), parts,
                                     [nodes = std::move(nodes), r, width](Node<T>& self) {
    std::size_t off = 0;
    for (auto* p : nodes) {
      const std::size_t c = p->shape.back();
      if (p->requires_grad) {
        T* g = p->ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[i * width + off + j];
      }
      off += c;
    }
  });
}

template <typename T>
BasicTensor<T> reshape(const BasicTensor<T>& x, Shape shape) {
  if (shape_numel(shape) != x.numel())
    throw DimensionError("reshape: cannot view " + shape_str(x.shape()) + " as " +
                         shape_str(shape));
  std::vector<T> out(x.data().begin(), x.data().end());
  auto* px = x.node();
  return BasicTensor<T>::make_result(std::move(shape), std::move(out), {x}, [px](Node<T>& self) {
    T* g = px->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
  });
}

template <typename T>
BasicTensor<T> sum(const BasicTensor<T>& x) {
  T total = 0;
  for (T v : x.data()) total += v;
  auto* px = x.node();
  return BasicTensor<T>::make_result({1}, {total}, {x}, [px](Node<T>& self) {
    T* g = px->ensure_grad();
    for (std::size_t i = 0; i < px->value.size(); ++i) g[i] += self.grad[0];
  });
}

template <typename T>
BasicTensor<T> mean(const BasicTensor<T>& x) {
  return scale(sum(x), T(1) / T(x.numel()));
}

#define LVLM_INSTANTIATE_OPS(T)                                                                  \
  template BasicTensor<T> add(const BasicTensor<T>&, const BasicTensor<T>&);                     \
  template BasicTensor<T> sub(const BasicTensor<T>&, const BasicTensor<T>&);                     \
  template BasicTensor<T> mul(const BasicTensor<T>&, const BasicTensor<T>&);                     \
  template BasicTensor<T> scale(const BasicTensor<T>&, T);                                       \
  template BasicTensor<T> add_bias(const BasicTensor<T>&, const BasicTensor<T>&);                \
  template BasicTensor<T> matmul(const BasicTensor<T>&, const BasicTensor<T>&);                  \
  template BasicTensor<T> matmul_nt(const BasicTensor<T>&, const BasicTensor<T>&);               \
  template BasicTensor<T> gelu(const BasicTensor<T>&);                                           \
  template BasicTensor<T> sigmoid(const BasicTensor<T>&);                                        \
  template BasicTensor<T> softmax_rows(const BasicTensor<T>&, bool);                             \
  template BasicTensor<T> layernorm(const BasicTensor<T>&, const BasicTensor<T>&,                \
                                    const BasicTensor<T>&, double);                              \
  template BasicTensor<T> dropout(const BasicTensor<T>&, double, bool, Rng&);                    \
  template BasicTensor<T> softmax_ce(const BasicTensor<T>&, std::span<const int>,                \
                                     std::span<const bool>);                                     \
  template BasicTensor<T> embedding(const BasicTensor<T>&, std::span<const int>);                \
  template BasicTensor<T> slice_rows(const BasicTensor<T>&, std::size_t, std::size_t);           \
  template BasicTensor<T> concat_rows(const std::vector<BasicTensor<T>>&);                       \
  template BasicTensor<T> slice_cols(const BasicTensor<T>&, std::size_t, std::size_t);           \
  template BasicTensor<T> concat_cols(const std::vector<BasicTensor<T>>&);                       \
  template BasicTensor<T> reshape(const BasicTensor<T>&, Shape);                                 \
  template BasicTensor<T> sum(const BasicTensor<T>&);                                            \
  template BasicTensor<T> mean(const BasicTensor<T>&);

LVLM_INSTANTIATE_OPS(float)
LVLM_INSTANTIATE_OPS(double)

}  // namespace lvlm
