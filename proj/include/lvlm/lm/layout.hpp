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
#include <span>
#include <vector>

namespace lvlm {

namespace tokens {
inline constexpr int kPad = 0;
inline constexpr int kEos = 1;
inline constexpr int kImageSep = 2;
inline constexpr int kAnswer = 3;
/// Occupies image-token slots; never embedded.
inline constexpr int kImage = 4;
inline constexpr int kUnknown = 5;
inline constexpr int kNumSpecial = 6;
}  // namespace tokens

enum class SpanSource { Original, Reasoned };

struct ImageSpan {
  std::size_t start = 0;
  std::size_t length = 0;
  SpanSource source = SpanSource::Original;
  bool operator==(const ImageSpan&) const = default;
};

/// Where the query block sits relative to the image blocks.
enum class Ordering { ImageFirst, PromptFirst };

/// Token ids with image spans. Positions inside a span hold tokens::kImage
/// and are filled with projected image tokens at forward time.
struct SequenceLayout {
  std::vector<int> tokens;
  std::vector<ImageSpan> spans;
  /// Index of the first label token, or tokens.size() when there are none.
  std::size_t label_start = 0;

  std::size_t size() const { return tokens.size(); }
  std::size_t label_count() const { return tokens.size() - label_start; }
  std::size_t count(SpanSource s) const;

  /// Throws ContractError unless spans are disjoint, in bounds, of length
  /// `image_tokens`, and exactly cover the kImage slots.
  void validate(std::size_t image_tokens) const;

  bool operator==(const SequenceLayout&) const = default;
};

/// Incremental builder; each image block is followed by kImageSep.
class LayoutBuilder {
 public:
  explicit LayoutBuilder(std::size_t image_tokens) : image_tokens_(image_tokens) {}
  LayoutBuilder& image(SpanSource source);
  LayoutBuilder& text(std::span<const int> ids);
  LayoutBuilder& token(int id);
  /// Appends kAnswer, then marks the label start and appends `labels`.
  LayoutBuilder& answer(std::span<const int> labels);
  SequenceLayout build() &&;

 private:
  std::size_t image_tokens_;
  SequenceLayout layout_;
  bool has_answer_ = false;
};

/// Single-image layout: [IMG][sep][query] (image-first) or
/// [query][IMG][sep] (prompt-first); no answer block.
SequenceLayout first_pass_layout(std::span<const int> query, std::size_t image_tokens,
                                 Ordering ordering);

/// Which image blocks the second pass sees.
enum class SecondPassImages {
  /// [IMG_orig][sep][IMG_reasoned][sep]
  OriginalAndReasoned,
  /// [IMG_reasoned][sep]
  ReasonedOnly,
  /// [IMG_orig][sep][IMG_orig][sep]: the duplicated-image baseline.
  OriginalTwice,
  /// [IMG_orig][sep]: the single-image baseline.
  OriginalOnly,
};

/// Answer-bearing layout: image blocks and query in `ordering`, then
/// [ans][labels]. With empty labels the layout ends at kAnswer and is a
/// decoding prefix.
SequenceLayout answer_layout(std::span<const int> query, std::span<const int> labels,
                             std::size_t image_tokens, Ordering ordering,
                             SecondPassImages images);

}  // namespace lvlm
