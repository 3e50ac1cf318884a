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

#include "lvlm/vision/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {
namespace {

struct Tap {
  std::size_t lo, hi;
  double frac;
};

// Source taps for each destination index with half-pixel alignment. At unit
// scale every tap lands exactly on a source pixel (frac == 0).
std::vector<Tap> taps(std::size_t in, std::size_t out) {
  std::vector<Tap> t(out);
  const double s = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double src = (static_cast<double>(i) + 0.5) * s - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    t[i] = {lo, std::min(lo + 1, in - 1), src - static_cast<double>(lo)};
  }
  return t;
}

}  // namespace

ImageGrid ImageGrid::blank(std::size_t height, std::size_t width, std::size_t channels) {
  ImageGrid g;
  g.height = height;
  g.width = width;
  g.channels = channels;
  g.pixels.assign(height * width * channels, 0.0f);
  return g;
}

ImageGrid preprocess(const RawImage& raw, std::size_t target_height, std::size_t patch_size) {
  if (raw.height == 0 || raw.width == 0 || raw.channels == 0)
    throw InputError("preprocess: empty image");
  if (raw.pixels.size() != raw.height * raw.width * raw.channels)
    throw InputError("preprocess: pixel buffer does not match " + std::to_string(raw.height) +
                     "x" + std::to_string(raw.width) + "x" + std::to_string(raw.channels));
  if (target_height == 0 || patch_size == 0) throw ConfigError("preprocess: zero target or patch");

  const auto scaled_width = static_cast<std::size_t>(
      std::llround(static_cast<double>(raw.width) * static_cast<double>(target_height) /
                   static_cast<double>(raw.height)));
  const std::size_t out_w = scaled_width / patch_size * patch_size;
  const std::size_t out_h = target_height / patch_size * patch_size;
  if (out_w == 0 || out_h == 0 || scaled_width == 0)
    throw InputError("preprocess: image smaller than one " + std::to_string(patch_size) +
                     "-pixel patch after resizing");

  const auto ty = taps(raw.height, target_height);
  const auto tx = taps(raw.width, scaled_width);
  const std::size_t c = raw.channels;
  auto px = [&](std::size_t y, std::size_t x, std::size_t ch) {
    return static_cast<double>(raw.pixels[(y * raw.width + x) * c + ch]);
  };
  ImageGrid out = ImageGrid::blank(out_h, out_w, c);
  for (std::size_t y = 0; y < out_h; ++y) {
    const auto& a = ty[y];
    for (std::size_t x = 0; x < out_w; ++x) {
      const auto& b = tx[x];
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double top = px(a.lo, b.lo, ch) * (1 - b.frac) + px(a.lo, b.hi, ch) * b.frac;
        const double bot = px(a.hi, b.lo, ch) * (1 - b.frac) + px(a.hi, b.hi, ch) * b.frac;
        out.at(y, x, ch) = static_cast<float>((top * (1 - a.frac) + bot * a.frac) / 255.0);
      }
    }
  }
  return out;
}

}  // namespace lvlm
