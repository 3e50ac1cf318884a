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

#include "lvlm/datasets/vocab.hpp"

#include <array>
#include <cctype>
#include <string>

#include "lvlm/lm/layout.hpp"
#include "lvlm/numerics/errors.hpp"
#include "lvlm/numerics/rng.hpp"

namespace lvlm {
namespace {

constexpr std::array<std::string_view, tokens::kNumSpecial> kSpecialNames = {
    "<pad>", "<eos>", "<sep>", "<ans>", "<img>", "<unk>"};

// Order is part of the token-id contract; append only.
constexpr std::string_view kWordList[] = {
    // option labels
    "a", "b", "c", "d", "1", "2", "3", "4",
    // punctuation
    "?", ".", ",", ":", "{", "}",
    // scenes
    "red", "green", "blue", "yellow", "magenta", "cyan",
    "square", "circle", "triangle", "cross", "shape", "shapes",
    "what", "color", "is", "the", "of", "left", "right", "above", "below", "describe",
    "scene", "and", "there", "are", "no", "how", "many",
    // navigation
    "\"action\"", "\"stay\"", "\"move_forward\"", "\"rotate_left\"", "\"rotate_right\"",
    "navigate", "to", "go", "goal", "white", "marker", "reply", "with", "json",
    // human-robot interaction captions
    "which", "option", "describes", "person", "inactive", "intervening", "doing",
    "stands", "still", "waits", "sits", "watches", "looks", "at", "phone", "reads", "book",
    "leans", "on", "wall", "rests", "bench", "walks", "toward", "robot", "points", "door",
    "reaches", "for", "box", "picks", "up", "cup", "talks", "waves", "hand", "blocks",
    "path", "steps", "in", "front", "pushes", "cart", "holds", "sign", "gestures", "stop",
    "hands", "tool", "moves", "chair", "away", "from", "near", "window", "table", "while",
    "smiling", "frowning", "slowly", "quickly", "silently", "calmly",
};

bool is_single_char_token(char c) {
  switch (c) {
    case '{': case '}': case '[': case ']': case ':': case ',':
    case '?': case '.': case '!': case '(': case ')':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '"') {
      flush();
      const auto close = text.find('"', i + 1);
      const auto end = close == std::string_view::npos ? text.size() : close + 1;
      std::string quoted;
      for (char q : text.substr(i, end - i))
        quoted.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(q))));
      if (close == std::string_view::npos) quoted.push_back('"');
      out.push_back(std::move(quoted));
      i = end - 1;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (is_single_char_token(c)) {
      flush();
      out.emplace_back(1, c);
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return out;
}

Vocabulary::Vocabulary(std::size_t size) : size_(size) {
  for (auto w : kWordList) words_.emplace_back(w);
  static_assert(std::size(kWordList) + tokens::kNumSpecial <= kFixedLimit);
  if (size_ < words_.size() + tokens::kNumSpecial)
    throw ConfigError("vocabulary of " + std::to_string(size_) + " cannot hold the " +
                      std::to_string(words_.size()) + " fixed words");
  for (std::size_t i = 0; i < words_.size(); ++i)
    index_.emplace(words_[i], static_cast<int>(i + tokens::kNumSpecial));
}

bool Vocabulary::is_fixed(std::string_view word) const {
  return index_.find(word) != index_.end();
}

int Vocabulary::id(std::string_view word) const {
  if (auto it = index_.find(word); it != index_.end()) return it->second;
  if (size_ <= kFixedLimit) return tokens::kUnknown;
  const auto span = static_cast<std::uint64_t>(size_ - kFixedLimit);
  return static_cast<int>(kFixedLimit + fnv1a64(word) % span);
}

std::string Vocabulary::word(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= size_)
    throw ContractError("token id " + std::to_string(id) + " outside vocabulary of " +
                        std::to_string(size_));
  if (id < tokens::kNumSpecial) return std::string(kSpecialNames[static_cast<std::size_t>(id)]);
  const auto slot = static_cast<std::size_t>(id - tokens::kNumSpecial);
  if (slot < words_.size()) return words_[slot];
  if (static_cast<std::size_t>(id) < kFixedLimit) return "<unk>";
  return "<w" + std::to_string(id) + ">";
}

std::vector<int> Vocabulary::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& w : split_words(text)) ids.push_back(id(w));
  return ids;
}

std::string Vocabulary::decode(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    if (id == tokens::kPad || id == tokens::kEos || id == tokens::kImageSep ||
        id == tokens::kAnswer || id == tokens::kImage)
      continue;
    if (!out.empty()) out.push_back(' ');
    out += word(id);
  }
  return out;
}

}  // namespace lvlm
