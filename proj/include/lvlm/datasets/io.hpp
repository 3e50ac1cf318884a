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

// Line-delimited record files. The first line is a header object
// {"format": <kind>, "version": 1, "count": n}; each further line is one
// record. Sample pixels are little-endian float32, base64-encoded.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lvlm/datasets/mcq.hpp"
#include "lvlm/datasets/sample.hpp"

namespace lvlm {

inline constexpr int kRecordFormatVersion = 1;

std::string encode_pixels(std::span<const float> pixels);
/// Throws InputError unless the payload decodes to exactly `count` floats.
std::vector<float> decode_pixels(const std::string& base64, std::size_t count);

void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples);
std::vector<Sample> read_samples(const std::filesystem::path& path);

void write_mcq(const std::filesystem::path& path, const std::vector<McqItem>& items);
std::vector<McqItem> read_mcq(const std::filesystem::path& path);

void write_captions(const std::filesystem::path& path, const std::vector<Caption>& captions);
std::vector<Caption> read_captions(const std::filesystem::path& path);

}  // namespace lvlm
