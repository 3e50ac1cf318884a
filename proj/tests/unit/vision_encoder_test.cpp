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

#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "lvlm/numerics/grad_check.hpp"
#include "lvlm/vision/encoder.hpp"
#include "lvlm/vision/image.hpp"

namespace lvlm {
namespace {

RawImage random_raw(std::size_t h, std::size_t w, Rng& rng) {
  RawImage raw{h, w, 3, std::vector<std::uint8_t>(h * w * 3)};
  for (auto& p : raw.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  return raw;
}

ImageGrid random_image(const ModelConfig& cfg, Rng& rng) {
  auto img = ImageGrid::blank(cfg.image_height, cfg.image_width, cfg.channels);
  for (auto& p : img.pixels) p = static_cast<float>(rng.uniform());
  return img;
}

template <typename T>
std::vector<T> values(const BasicTensor<T>& t) {
  return {t.data().begin(), t.data().end()};
}

TEST(Preprocess, HighDefinitionFrameTo360p) {
  Rng rng(1);
  auto grid = preprocess(random_raw(720, 1280, rng), 360, 8);
  EXPECT_EQ(grid.height, 360u);
  EXPECT_EQ(grid.width, 640u);
  for (float p : grid.pixels) {
    ASSERT_GE(p, 0.0f);
    ASSERT_LE(p, 1.0f);
  }
}

TEST(Preprocess, AlignedInputOnlyNormalises) {
  Rng rng(2);
  auto raw = random_raw(36, 48, rng);
  auto grid = preprocess(raw, 36, 6);
  ASSERT_EQ(grid.width, 48u);
  for (std::size_t i = 0; i < raw.pixels.size(); ++i)
    ASSERT_EQ(grid.pixels[i], static_cast<float>(raw.pixels[i] / 255.0));
}

TEST(Preprocess, WidthFlooredToPatchMultiple) {
  Rng rng(3);
  auto raw = random_raw(36, 50, rng);
  auto grid = preprocess(raw, 36, 6);
  EXPECT_EQ(grid.height, 36u);
  EXPECT_EQ(grid.width, 48u);
  // Cropping keeps the left columns untouched.
  EXPECT_EQ(grid.at(5, 47, 1), static_cast<float>(raw.pixels[(5 * 50 + 47) * 3 + 1] / 255.0));
}

TEST(Preprocess, TooSmallOrEmptyIsInputError) {
  Rng rng(4);
  EXPECT_THROW(preprocess(random_raw(40, 4, rng), 20, 6), InputError);
  EXPECT_THROW(preprocess(RawImage{}, 36, 6), InputError);
}

TEST(PatchOrder, WindowMajorCoversGridOnce) {
  auto order = patch_order(ModelConfig::toy());
  ASSERT_EQ(order.size(), 16u);
  std::set<std::pair<std::size_t, std::size_t>> seen(order.begin(), order.end());
  EXPECT_EQ(seen.size(), 16u);
  // First merge window is the top-left 2x2 block.
  EXPECT_EQ(order[0], (std::pair<std::size_t, std::size_t>{0, 0}));
  EXPECT_EQ(order[1], (std::pair<std::size_t, std::size_t>{0, 1}));
  EXPECT_EQ(order[2], (std::pair<std::size_t, std::size_t>{1, 0}));
  EXPECT_EQ(order[3], (std::pair<std::size_t, std::size_t>{1, 1}));
  EXPECT_EQ(order[4], (std::pair<std::size_t, std::size_t>{0, 2}));
}

TEST(EmbedPatches, SixteenPatchesFromSixteenPixelImage) {
  auto cfg = ModelConfig::toy();
  cfg.image_height = cfg.image_width = 16;
  cfg.patch_size = 4;
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(5));
  Rng rng(6);
  auto pe = enc.embed_patches(random_image(cfg, rng));
  EXPECT_EQ(pe.shape(), (Shape{16, cfg.d_embed}));
}

TEST(EmbedPatches, ZeroImageWithZeroPositionsGivesBiasRows) {
  auto cfg = ModelConfig::toy();
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(7));
  for (auto& v : enc.positions.mutable_data()) v = 0.0f;
  Rng rng(8);
  for (auto& v : enc.patch_bias.mutable_data()) v = static_cast<float>(rng.normal());
  auto pe = enc.embed_patches(ImageGrid::blank(cfg.image_height, cfg.image_width));
  for (std::size_t r = 0; r < pe.rows(); ++r)
    for (std::size_t c = 0; c < pe.cols(); ++c) ASSERT_EQ(pe.at(r, c), enc.patch_bias.data()[c]);
}

TEST(EmbedPatches, ChangeIsLocalToOnePatch) {
  auto cfg = ModelConfig::toy();
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(9));
  Rng rng(10);
  auto a = random_image(cfg, rng);
  auto b = a;
  // Pixel (13, 20) lies in patch row 2, col 3.
  b.at(13, 20, 0) = 1.0f - b.at(13, 20, 0);
  auto order = patch_order(cfg);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (order[i] == std::pair<std::size_t, std::size_t>{2, 3}) changed = i;
  auto ea = enc.embed_patches(a);
  auto eb = enc.embed_patches(b);
  for (std::size_t r = 0; r < ea.rows(); ++r) {
    bool same = true;
    for (std::size_t c = 0; c < ea.cols(); ++c) same = same && ea.at(r, c) == eb.at(r, c);
    EXPECT_EQ(same, r != changed) << "row " << r;
  }
}

TEST(Encode, ZeroDeltaIsBitwiseIdentity) {
  auto cfg = ModelConfig::toy();
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(11));
  Rng rng(12);
  auto pe = enc.embed_patches(random_image(cfg, rng));
  auto zero = Tensor::zeros(pe.shape());
  EXPECT_EQ(values(enc.encode(pe)), values(enc.encode(pe, &zero)));
}

TEST(Encode, NonzeroDeltaChangesOutput) {
  auto cfg = ModelConfig::toy();
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(13));
  Rng rng(14);
  auto pe = enc.embed_patches(random_image(cfg, rng));
  auto delta = normal_tensor<float>(pe.shape(), 0.1, rng);
  auto a = enc.encode(pe);
  auto b = enc.encode(pe, &delta);
  double l2 = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) l2 += std::pow(a.data()[i] - b.data()[i], 2);
  EXPECT_GT(l2, 0.0);
}

TEST(Encode, DeltaShapeMismatchIsContractError) {
  auto cfg = ModelConfig::toy();
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(15));
  Rng rng(16);
  auto pe = enc.embed_patches(random_image(cfg, rng));
  auto bad = Tensor::zeros({pe.rows() - 1, pe.cols()});
  EXPECT_THROW(enc.encode(pe, &bad), ContractError);
}

TEST(Encode, GradientWithRespectToDelta) {
  auto cfg = ModelConfig::micro();
  ParamStore<double> store64;
  VisionEncoder<double> enc64(cfg, store64, Rng(17));
  ParamStore<float> store32;
  VisionEncoder<float> enc32(cfg, store32, Rng(17));
  Rng rng(18);
  auto img = random_image(cfg, rng);
  auto pe64 = enc64.embed_patches(img);
  auto pe32 = enc32.embed_patches(img);
  auto weights = normal_tensor<double>(pe64.shape(), 1.0, rng);
  auto f = [&](const auto& delta) {
    using V = typename std::decay_t<decltype(delta)>::value_type;
    auto out = [&] {
      if constexpr (std::is_same_v<V, float>)
        return enc32.encode(pe32, &delta);
      else
        return enc64.encode(pe64, &delta);
    }();
    return sum(mul(out, cast<V>(weights)));
  };
  auto start = normal_tensor<double>(pe64.shape(), 0.05, rng);
  EXPECT_LT(grad_check<double>(f, start, 1e-6, 1e-4).max_rel_error, 1e-6);
  EXPECT_LT(grad_check<float>(f, cast<float>(start), 1e-4, 1e-2).max_rel_error, 1e-4);
}

TEST(MergePatches, TokenCountLaw) {
  for (auto cfg : {ModelConfig::toy(), ModelConfig::micro(), ModelConfig::reference_7b()}) {
    EXPECT_EQ(cfg.num_image_tokens() * cfg.merge_factor, cfg.num_patches());
  }
  auto cfg = ModelConfig::toy();
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(19));
  Rng rng(20);
  auto tokens = enc.merge_patches(enc.encode(enc.embed_patches(random_image(cfg, rng))));
  EXPECT_EQ(tokens.shape(), (Shape{4, cfg.d_llm}));
}

TEST(MergePatches, IdentityMapWithUnitFactorCopiesFeatures) {
  auto cfg = ModelConfig::toy();
  cfg.merge_factor = 1;
  cfg.d_llm = cfg.d_embed;
  cfg.lm_kv_dim = cfg.d_llm;
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(21));
  auto w = enc.merger_weight.mutable_data();
  std::fill(w.begin(), w.end(), 0.0f);
  for (std::size_t i = 0; i < cfg.d_embed; ++i) w[i * cfg.d_embed + i] = 1.0f;
  Rng rng(22);
  auto features = normal_tensor<float>({16, cfg.d_embed}, 1.0, rng);
  EXPECT_EQ(values(enc.merge_patches(features)), values(features));
}

TEST(MergePatches, PermutingGroupsPermutesTokens) {
  auto cfg = ModelConfig::toy();
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(23));
  Rng rng(24);
  auto f = normal_tensor<float>({16, cfg.d_embed}, 1.0, rng);
  auto g = concat_rows(std::vector{slice_rows(f, 8, 4), slice_rows(f, 4, 4), slice_rows(f, 0, 4),
                                   slice_rows(f, 12, 4)});
  auto tf = enc.merge_patches(f);
  auto tg = enc.merge_patches(g);
  EXPECT_EQ(values(slice_rows(tf, 2, 1)), values(slice_rows(tg, 0, 1)));
  EXPECT_EQ(values(slice_rows(tf, 1, 1)), values(slice_rows(tg, 1, 1)));
  EXPECT_EQ(values(slice_rows(tf, 0, 1)), values(slice_rows(tg, 2, 1)));
  EXPECT_EQ(values(slice_rows(tf, 3, 1)), values(slice_rows(tg, 3, 1)));
}

TEST(MergePatches, IndivisibleCountIsConfigError) {
  auto cfg = ModelConfig::toy();
  ParamStore<float> store;
  VisionEncoder<float> enc(cfg, store, Rng(25));
  EXPECT_THROW(enc.merge_patches(Tensor::zeros({15, cfg.d_embed})), ConfigError);
  auto bad = cfg;
  bad.merge_factor = 3;
  EXPECT_THROW(bad.validate(), ConfigError);
}

}  // namespace
}  // namespace lvlm
