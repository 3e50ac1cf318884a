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

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "lvlm/numerics/adamw.hpp"
#include "lvlm/numerics/grad_check.hpp"
#include "lvlm/numerics/ops.hpp"
#include "lvlm/numerics/rng.hpp"

namespace lvlm {
namespace {

template <typename T>
BasicTensor<T> random_tensor(Shape shape, Rng& rng, double std = 1.0) {
  std::vector<T> v(shape_numel(shape));
  for (auto& x : v) x = static_cast<T>(std * rng.normal());
  return BasicTensor<T>(std::move(shape), std::move(v));
}

// Weights a result with fixed pseudo-random coefficients so every output
// element contributes a distinct amount to the scalar.
template <typename T>
BasicTensor<T> probe(const BasicTensor<T>& y) {
  Rng rng(977);
  std::vector<T> w(y.numel());
  for (auto& x : w) x = static_cast<T>(rng.uniform(-1.0, 1.0));
  return sum(mul(y, BasicTensor<T>(y.shape(), std::move(w))));
}

const std::vector<Shape> kShapes = {{3, 4}, {5, 2}, {1, 7}};

TEST(Matmul, IdentityAndProjector) {
  Tensor eye({2, 2}, {1, 0, 0, 1});
  Tensor m({2, 2}, {1, 2, 3, 4});
  auto r = matmul(eye, m);
  EXPECT_EQ(std::vector<float>(r.data().begin(), r.data().end()), (std::vector<float>{1, 2, 3, 4}));
  Tensor p({2, 2}, {1, 0, 0, 0});
  Tensor c({2, 1}, {5, 7});
  auto q = matmul(p, c);
  EXPECT_EQ(q.shape(), (Shape{2, 1}));
  EXPECT_EQ(q.at(0, 0), 5.0f);
  EXPECT_EQ(q.at(1, 0), 0.0f);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  Tensor a = Tensor::zeros({2, 3});
  Tensor b = Tensor::zeros({2, 3});
  try {
    matmul(a, b);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("[2, 3]"), std::string::npos) << msg;
  }
}

TEST(Matmul, GradientsMatchFiniteDifferences) {
  Rng rng(1);
  auto a = random_tensor<double>({3, 4}, rng);
  auto b = random_tensor<double>({4, 2}, rng);
  auto wrt_a = grad_check<double>(
      [&](const auto& x) {
        using Tn = std::decay_t<decltype(x)>;
        return probe(matmul(x, cast<typename Tn::value_type>(b)));
      },
      a, 1e-6);
  auto wrt_b = grad_check<double>(
      [&](const auto& x) {
        using Tn = std::decay_t<decltype(x)>;
        return probe(matmul(cast<typename Tn::value_type>(a), x));
      },
      b, 1e-6);
  EXPECT_LT(wrt_a.max_rel_error, 1e-4);
  EXPECT_LT(wrt_b.max_rel_error, 1e-4);
}

TEST(Gelu, ClosedFormValues) {
  auto y = gelu(Tensor64({3}, {0.0, 1.0, -10.0}));
  EXPECT_EQ(y.data()[0], 0.0);
  EXPECT_NEAR(y.data()[1], 0.5 * (1.0 + std::erf(1.0 / std::sqrt(2.0))), 1e-15);
  EXPECT_NEAR(y.data()[1], 0.841344746, 1e-9);
  EXPECT_LT(std::abs(y.data()[2]), 1e-9);
}

TEST(Sigmoid, SaturationAndSymmetry) {
  auto y = sigmoid(Tensor({4}, {0.0f, 1000.0f, -1000.0f, 3.0f}));
  EXPECT_EQ(y.data()[0], 0.5f);
  EXPECT_EQ(y.data()[1], 1.0f);
  EXPECT_EQ(y.data()[2], 0.0f);
  EXPECT_TRUE(std::isfinite(y.data()[3]));

  Rng rng(2);
  auto x = random_tensor<double>({50}, rng, 5.0);
  auto pos = sigmoid(x);
  auto neg = sigmoid(scale(x, -1.0));
  for (std::size_t i = 0; i < x.numel(); ++i) EXPECT_NEAR(pos.data()[i] + neg.data()[i], 1.0, 1e-15);
}

TEST(SoftmaxCe, UniformLogitsGiveLogV) {
  std::vector<int> targets = {2};
  auto loss = softmax_ce(Tensor64::zeros({1, 4}), std::span<const int>(targets));
  EXPECT_NEAR(loss.item(), std::log(4.0), 1e-12);
}

TEST(SoftmaxCe, LossVanishesWithMargin) {
  std::vector<int> targets = {1};
  double prev = 1e9;
  for (double margin : {1.0, 5.0, 20.0, 60.0}) {
    auto loss = softmax_ce(Tensor64({1, 3}, {0.0, margin, 0.0}), std::span<const int>(targets)).item();
    EXPECT_GE(loss, 0.0);
    EXPECT_LT(loss, prev);
    prev = loss;
  }
  EXPECT_LT(prev, 1e-20);
}

TEST(SoftmaxCe, AllIgnoredIsDegenerate) {
  std::vector<int> targets = {0, 1};
  bool ignore[] = {true, true};
  EXPECT_THROW(softmax_ce(Tensor::zeros({2, 3}), std::span<const int>(targets),
                          std::span<const bool>(ignore)),
               ContractError);
}

TEST(SoftmaxCe, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  auto logits = random_tensor<double>({5, 7}, rng);
  std::vector<int> targets = {0, 6, 3, 3, 1};
  bool ignore[] = {false, true, false, false, false};
  auto r = grad_check<double>(
      [&](const auto& x) {
        return softmax_ce(x, std::span<const int>(targets), std::span<const bool>(ignore));
      },
      logits, 1e-6);
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(SoftmaxCe, NonNegativeOnRandomInputs) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto logits = random_tensor<float>({3, 6}, rng, 4.0);
    std::vector<int> targets = {static_cast<int>(rng.below(6)), static_cast<int>(rng.below(6)),
                                static_cast<int>(rng.below(6))};
    EXPECT_GE(softmax_ce(logits, std::span<const int>(targets)).item(), 0.0f);
  }
}

TEST(LayerNorm, ConstantRowMapsToZero) {
  auto y = layernorm(Tensor::filled({2, 4}, 3.5f), Tensor::filled({4}, 1.0f), Tensor::zeros({4}));
  for (float v : y.data()) EXPECT_EQ(v, 0.0f);
}

TEST(LayerNorm, RowsAreStandardised) {
  Rng rng(5);
  auto x = random_tensor<double>({6, 16}, rng, 3.0);
  auto y = layernorm(x, Tensor64::filled({16}, 1.0), Tensor64::zeros({16}));
  for (std::size_t r = 0; r < 6; ++r) {
    double m = 0, v = 0;
    for (std::size_t c = 0; c < 16; ++c) m += y.at(r, c);
    m /= 16;
    for (std::size_t c = 0; c < 16; ++c) v += (y.at(r, c) - m) * (y.at(r, c) - m);
    v /= 16;
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR(v, 1.0, 1e-4);
  }
}

TEST(Dropout, IdentityCases) {
  Rng rng(6);
  auto x = random_tensor<float>({4, 5}, rng);
  auto same = dropout(x, 0.0, true, rng);
  auto eval = dropout(x, 0.7, false, rng);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    EXPECT_EQ(same.data()[i], x.data()[i]);
    EXPECT_EQ(eval.data()[i], x.data()[i]);
  }
  EXPECT_THROW(dropout(x, 1.0, true, rng), ConfigError);
  EXPECT_THROW(dropout(x, -0.1, true, rng), ConfigError);
}

TEST(Dropout, MonteCarloKeepRateAndMean) {
  Rng rng(7);
  const std::size_t n = 100000;
  auto y = dropout(Tensor64::filled({n}, 1.0), 0.5, true, rng);
  std::size_t kept = 0;
  double total = 0;
  for (double v : y.data()) {
    if (v != 0.0) {
      ++kept;
      EXPECT_EQ(v, 2.0);
    }
    total += v;
  }
  EXPECT_NEAR(static_cast<double>(kept) / n, 0.5, 0.01);
  EXPECT_NEAR(total / n, 1.0, 0.02);
}

TEST(Backward, SquareAtThree) {
  Tensor64 x({1}, {3.0}, true);
  backward(mul(x, x));
  ASSERT_TRUE(x.has_grad());
  EXPECT_EQ(x.grad()[0], 6.0);
}

TEST(Backward, CompositeSigmoidTimesGelu) {
  auto r = grad_check<double>([](const auto& x) { return mul(sigmoid(x), gelu(x)); },
                              Tensor64({1}, {0.7}), 1e-6);
  EXPECT_LT(r.max_rel_error, 1e-5);
}

TEST(Backward, NonScalarLossIsContractError) {
  Tensor x({2}, {1, 2}, true);
  EXPECT_THROW(backward(scale(x, 2.0f)), ContractError);
}

TEST(Backward, FrozenSubtreeHasNoGradAndLeavesOthersUnchanged) {
  Rng rng(8);
  auto a0 = random_tensor<double>({3, 4}, rng);
  auto w0 = random_tensor<double>({4, 4}, rng);
  auto run = [&](bool freeze_w) {
    Tensor64 a(a0.shape(), {a0.data().begin(), a0.data().end()}, true);
    Tensor64 w(w0.shape(), {w0.data().begin(), w0.data().end()}, !freeze_w);
    backward(probe(gelu(matmul(a, w))));
    return std::pair{a, w};
  };
  auto [a_full, w_full] = run(false);
  auto [a_frozen, w_frozen] = run(true);
  EXPECT_FALSE(w_frozen.has_grad());
  ASSERT_TRUE(a_frozen.has_grad());
  for (std::size_t i = 0; i < a0.numel(); ++i) EXPECT_EQ(a_frozen.grad()[i], a_full.grad()[i]);
}

TEST(Backward, SharedSubexpressionAccumulates) {
  Tensor64 x({1}, {2.0}, true);
  auto y = mul(x, x);
  backward(add(y, mul(y, x)));  // x^2 + x^3 → 2x + 3x^2 = 16
  EXPECT_DOUBLE_EQ(x.grad()[0], 16.0);
}

TEST(NoGrad, RecordsNothing) {
  Tensor x({2}, {1, 2}, true);
  NoGradGuard guard;
  auto y = sum(mul(x, x));
  EXPECT_FALSE(y.requires_grad());
}

// Every differentiable op against the 64-bit oracle, on three shapes, in
// both precisions.
template <typename T>
class OpGradients : public ::testing::Test {};
using Precisions = ::testing::Types<float, double>;
TYPED_TEST_SUITE(OpGradients, Precisions);

template <typename T>
double tolerance() {
  return std::is_same_v<T, float> ? 1e-4 : 1e-6;
}
// Coordinates whose true derivative is near zero are dominated by forward
// rounding (32-bit) or difference-quotient cancellation (64-bit); below the
// floor the check becomes an absolute one.
template <typename T>
double floor_for() {
  return std::is_same_v<T, float> ? 1e-2 : 1e-4;
}

template <typename T, typename F>
void check_unary(F&& f, double input_std = 1.0) {
  Rng rng(11);
  for (const auto& shape : kShapes) {
    auto x = random_tensor<T>(shape, rng, input_std);
    auto r = grad_check<T>([&](const auto& t) { return probe(f(t)); }, x,
                           std::is_same_v<T, float> ? 1e-4 : 1e-5, floor_for<T>());
    EXPECT_LT(r.max_rel_error, tolerance<T>()) << "shape " << shape_str(shape) << " worst "
                                               << r.worst_index << " analytic "
                                               << r.analytic_at_worst << " numeric "
                                               << r.numeric_at_worst;
  }
}

TYPED_TEST(OpGradients, Unary) {
  using T = TypeParam;
  check_unary<T>([](const auto& x) { return gelu(x); });
  check_unary<T>([](const auto& x) { return sigmoid(x); });
  check_unary<T>([](const auto& x) { return mul(x, x); });
  check_unary<T>([](const auto& x) {
    using V = typename std::decay_t<decltype(x)>::value_type;
    return scale(sub(x, gelu(x)), V(1.5));
  });
}

TYPED_TEST(OpGradients, RowOps) {
  using T = TypeParam;
  check_unary<T>([](const auto& x) {
    using V = typename std::decay_t<decltype(x)>::value_type;
    auto g = BasicTensor<V>::filled({x.cols()}, V(1.3));
    auto b = BasicTensor<V>::filled({x.cols()}, V(-0.2));
    return layernorm(x, g, b);
  });
  check_unary<T>([](const auto& x) { return softmax_rows(matmul_nt(x, x), false); });
  check_unary<T>([](const auto& x) { return softmax_rows(matmul_nt(x, x), true); });
  check_unary<T>([](const auto& x) {
    using V = typename std::decay_t<decltype(x)>::value_type;
    return add_bias(x, BasicTensor<V>::filled({x.cols()}, V(0.5)));
  });
}

TYPED_TEST(OpGradients, StructuralOps) {
  using T = TypeParam;
  check_unary<T>([](const auto& x) { return concat_rows(std::vector{x, gelu(x)}); });
  check_unary<T>([](const auto& x) { return concat_cols(std::vector{gelu(x), x}); });
  check_unary<T>([](const auto& x) { return slice_rows(concat_rows(std::vector{x, x}), 1, x.rows()); });
  check_unary<T>([](const auto& x) { return slice_cols(concat_cols(std::vector{x, x}), 1, x.cols()); });
  check_unary<T>([](const auto& x) { return reshape(x, Shape{x.numel()}); });
  check_unary<T>([](const auto& x) { return mean(mul(x, x)); });
}

TYPED_TEST(OpGradients, EmbeddingTable) {
  using T = TypeParam;
  check_unary<T>([](const auto& table) {
    const int rows = static_cast<int>(table.rows());
    std::vector<int> ids = {2 % rows, 0, 2 % rows, 1 % rows};
    return embedding(table, std::span<const int>(ids));
  });
}

TEST(GradCheck, QuadraticFormIn64Bit) {
  Rng rng(12);
  auto a = random_tensor<double>({4, 4}, rng);
  auto r = grad_check<double>(
      [&](const auto& x) {
        using V = typename std::decay_t<decltype(x)>::value_type;
        auto m = cast<V>(a);
        return sum(mul(x, matmul(x, m)));
      },
      random_tensor<double>({1, 4}, rng), 1e-5);
  EXPECT_LT(r.max_rel_error, 1e-7);
}

TEST(GradCheck, ConstantFunctionHasZeroGradients) {
  auto r = grad_check<double>(
      [](const auto& x) {
        using V = typename std::decay_t<decltype(x)>::value_type;
        return add(scale(sum(x), V(0)), BasicTensor<V>::scalar(V(4)));
      },
      Tensor64({3}, {1, 2, 3}), 1e-6);
  EXPECT_EQ(r.max_rel_error, 0.0);
  EXPECT_EQ(r.analytic_at_worst, 0.0);
  EXPECT_EQ(r.numeric_at_worst, 0.0);
}

TEST(AdamW, FirstStepMovesByLearningRate) {
  Tensor64 theta({1}, {1.0}, true);
  backward(scale(theta, 2.0));  // g = 2
  AdamW<double> opt({theta}, {.lr = 0.1, .weight_decay = 0.0});
  opt.step();
  EXPECT_NEAR(theta.data()[0], 0.9, 1e-7);
  EXPECT_EQ(opt.step_count(), 1u);
}

TEST(AdamW, ZeroGradientWithoutDecayIsNoOp) {
  Tensor64 theta({2}, {1.0, -3.0}, true);
  backward(scale(sum(theta), 0.0));
  AdamW<double> opt({theta}, {.lr = 0.1, .weight_decay = 0.0});
  for (int i = 0; i < 3; ++i) opt.step();
  EXPECT_EQ(theta.data()[0], 1.0);
  EXPECT_EQ(theta.data()[1], -3.0);
  EXPECT_EQ(opt.step_count(), 3u);
}

TEST(AdamW, DecoupledDecayShrinksByFactor) {
  Tensor64 theta({1}, {2.0}, true);
  AdamW<double> opt({theta}, {.lr = 0.1, .weight_decay = 0.5});
  opt.step();
  EXPECT_DOUBLE_EQ(theta.data()[0], 2.0 * (1.0 - 0.1 * 0.5));
}

TEST(AdamW, MomentsStartAtZeroAndStepCountIncrements) {
  Tensor theta({3}, {1, 2, 3}, true);
  AdamW<float> opt({theta}, {});
  EXPECT_EQ(opt.step_count(), 0u);
  for (float m : opt.first_moment()[0]) EXPECT_EQ(m, 0.0f);
  for (float v : opt.second_moment()[0]) EXPECT_EQ(v, 0.0f);
}

TEST(Rng, SplitStreamsAreReproducibleAndDistinct) {
  Rng base(42);
  auto a = base.split("dropout");
  auto b = Rng(42).split("dropout");
  auto c = base.split("init");
  for (int i = 0; i < 10; ++i) {
    auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    EXPECT_NE(va, c.next_u64());
  }
}

TEST(Rng, BelowIsUniform) {
  Rng rng(9);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 40000; ++i) ++counts[rng.below(4)];
  for (int c : counts) EXPECT_NEAR(c / 40000.0, 0.25, 0.01);
}

TEST(Determinism, EqualSeedsGiveBitwiseEqualOutputs) {
  auto run = [] {
    Rng rng(31);
    auto x = random_tensor<float>({8, 8}, rng);
    auto y = dropout(gelu(matmul(x, x)), 0.3, true, rng);
    return std::vector<float>(y.data().begin(), y.data().end());
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace lvlm
