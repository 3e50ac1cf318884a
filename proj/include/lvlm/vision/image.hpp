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
#include <cstdint>
#include <vector>

namespace lvlm {

/// 8-bit interleaved pixels as decoded from a file, row-major, channel last.
struct RawImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 3;
  std::vector<std::uint8_t> pixels;
};

/// Normalised image, row-major with channels interleaved. Values in [0, 1].
struct ImageGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 3;
  std::vector<float> pixels;

  static ImageGrid blank(std::size_t height, std::size_t width, std::size_t channels = 3);

  float& at(std::size_t y, std::size_t x, std::size_t c) {
    return pixels[(y * width + x) * channels + c];
  }
  float at(std::size_t y, std::size_t x, std::size_t c) const {
    return pixels[(y * width + x) * channels + c];
  }
  bool operator==(const ImageGrid&) const = default;
};

inline constexpr std::size_t kDefaultTargetHeight = 36;

/// Bilinear resize (half-pixel centres) so the height equals `target_height`
/// and the width keeps the aspect ratio, then crops the rightmost columns to
/// a multiple of `patch_size` and scales pixels to [0, 1]. Throws InputError
/// for empty input or a result smaller than one patch.
ImageGrid preprocess(const RawImage& raw, std::size_t target_height, std::size_t patch_size);

}  // namespace lvlm
