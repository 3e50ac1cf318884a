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

#include "lvlm/datasets/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>
#include <sodium.h>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "record files assume little-endian");
constexpr int kBase64Variant = sodium_base64_VARIANT_ORIGINAL;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void write_records(const std::filesystem::path& path, std::string_view format,
                   const std::vector<json>& records) {
  auto out = open_out(path);
  out << json{{"format", format}, {"version", kRecordFormatVersion}, {"count", records.size()}}.dump()
      << '\n';
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) throw InputError("write failed for " + path.string());
}

std::vector<json> read_records(const std::filesystem::path& path, std::string_view format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": missing header line");
  std::vector<json> records;
  try {
    auto header = json::parse(line);
    if (header.at("format").get<std::string>() != format)
      throw InputError(path.string() + ": expected format '" + std::string(format) + "'");
    if (header.at("version").get<int>() != kRecordFormatVersion)
      throw InputError(path.string() + ": unsupported version");
    const auto count = header.at("count").get<std::size_t>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      records.push_back(json::parse(line));
    }
    if (records.size() != count)
      throw InputError(path.string() + ": header announces " + std::to_string(count) +
                       " records, found " + std::to_string(records.size()));
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return records;
}

template <typename F>
auto parse_guard(const std::filesystem::path& path, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string encode_pixels(std::span<const float> pixels) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(pixels.data());
  const std::size_t n = pixels.size_bytes();
  std::string out(sodium_base64_encoded_len(n, kBase64Variant), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes, n, kBase64Variant);
  out.resize(std::strlen(out.c_str()));
  return out;
}

std::vector<float> decode_pixels(const std::string& base64, std::size_t count) {
  std::vector<float> out(count);
  std::size_t written = 0;
  const char* end = nullptr;
  if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), count * sizeof(float),
                        base64.data(), base64.size(), nullptr, &written, &end,
                        kBase64Variant) != 0 ||
      written != count * sizeof(float) || end != base64.data() + base64.size())
    throw InputError("pixel payload does not decode to " + std::to_string(count) + " floats");
  return out;
}

void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  std::vector<json> records;
  for (const auto& s : samples) {
    records.push_back({{"task", task_name(s.task)},
                       {"height", s.image.height},
                       {"width", s.image.width},
                       {"channels", s.image.channels},
                       {"pixels", encode_pixels(s.image.pixels)},
                       {"query", s.query},
                       {"label", s.label},
                       {"options", s.options},
                       {"correct_option", s.correct_option}});
  }
  write_records(path, "lvlm-samples", records);
}

std::vector<Sample> read_samples(const std::filesystem::path& path) {
  auto records = read_records(path, "lvlm-samples");
  return parse_guard(path, [&] {
    std::vector<Sample> out;
    for (const auto& r : records) {
      Sample s;
      auto task = parse_task(r.at("task").get<std::string>());
      if (!task) throw InputError(path.string() + ": unknown task");
      s.task = *task;
      s.image.height = r.at("height").get<std::size_t>();
      s.image.width = r.at("width").get<std::size_t>();
      s.image.channels = r.at("channels").get<std::size_t>();
      s.image.pixels = decode_pixels(r.at("pixels").get<std::string>(),
                                     s.image.height * s.image.width * s.image.channels);
      s.query = r.at("query").get<std::vector<int>>();
      s.label = r.at("label").get<std::vector<int>>();
      s.options = r.at("options").get<std::vector<std::string>>();
      s.correct_option = r.at("correct_option").get<int>();
      out.push_back(std::move(s));
    }
    return out;
  });
}

void write_mcq(const std::filesystem::path& path, const std::vector<McqItem>& items) {
  std::vector<json> records;
  for (const auto& it : items) {
    records.push_back({{"question", it.question},
                       {"options", it.options},
                       {"correct", it.correct},
                       {"event", it.event_id},
                       {"target", role_name(it.target)},
                       {"position", position_name(it.position)}});
  }
  write_records(path, "lvlm-mcq", records);
}

std::vector<McqItem> read_mcq(const std::filesystem::path& path) {
  auto records = read_records(path, "lvlm-mcq");
  return parse_guard(path, [&] {
    std::vector<McqItem> out;
    for (const auto& r : records) {
      McqItem it;
      it.question = r.at("question").get<std::string>();
      it.options = r.at("options").get<std::array<std::string, 4>>();
      it.correct = r.at("correct").get<int>();
      it.event_id = r.at("event").get<int>();
      auto role = parse_role(r.at("target").get<std::string>());
      auto pos = parse_position(r.at("position").get<std::string>());
      if (!role || !pos) throw InputError(path.string() + ": bad role or position");
      it.target = *role;
      it.position = *pos;
      if (!it.valid()) throw InputError(path.string() + ": invalid multiple-choice item");
      out.push_back(std::move(it));
    }
    return out;
  });
}

void write_captions(const std::filesystem::path& path, const std::vector<Caption>& captions) {
  std::vector<json> records;
  for (const auto& c : captions) {
    records.push_back({{"event", c.event_id},
                       {"role", role_name(c.role)},
                       {"position", position_name(c.position)},
                       {"text", c.text}});
  }
  write_records(path, "lvlm-captions", records);
}

std::vector<Caption> read_captions(const std::filesystem::path& path) {
  auto records = read_records(path, "lvlm-captions");
  return parse_guard(path, [&] {
    std::vector<Caption> out;
    for (const auto& r : records) {
      Caption c;
      c.event_id = r.at("event").get<int>();
      auto role = parse_role(r.at("role").get<std::string>());
      auto pos = parse_position(r.at("position").get<std::string>());
      if (!role || !pos) throw InputError(path.string() + ": bad role or position");
      c.role = *role;
      c.position = *pos;
      c.text = r.at("text").get<std::string>();
      out.push_back(std::move(c));
    }
    return out;
  });
}

}  // namespace lvlm
