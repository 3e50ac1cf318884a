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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lvlm {

/// Splits text into lowercase word tokens. Each of { } [ ] : , ? . ! ( )
/// is a token on its own; a double-quoted string, quotes included, is one
/// token.
std::vector<std::string> split_words(std::string_view text);

/// Word-level vocabulary over a fixed synthetic word list.
///
/// Ids below tokens::kNumSpecial are the special tokens. Fixed words take
/// the ids after them, all below kFixedLimit. Other words hash into
/// [kFixedLimit, size) when the table is large enough and map to
/// tokens::kUnknown otherwise; hashed ids decode as "<w###>".
class Vocabulary {
 public:
  static constexpr std::size_t kFixedLimit = 256;

  explicit Vocabulary(std::size_t size);

  std::size_t size() const { return size_; }
  std::size_t fixed_words() const { return words_.size(); }

  int id(std::string_view word) const;
  /// Text form of one id; specials render as "<eos>", "<unk>", ...
  std::string word(int id) const;
  bool is_fixed(std::string_view word) const;

  std::vector<int> encode(std::string_view text) const;
  /// Space-joined words; padding, end, separator, answer and image
  /// placeholder ids are dropped.
  std::string decode(std::span<const int> ids) const;

 private:
  std::size_t size_;
  std::vector<std::string> words_;
  std::map<std::string, int, std::less<>> index_;
};

}  // namespace lvlm
