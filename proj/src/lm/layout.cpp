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

#include "lvlm/lm/layout.hpp"

#include <algorithm>
#include <string>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {

std::size_t SequenceLayout::count(SpanSource s) const {
  return static_cast<std::size_t>(
      std::count_if(spans.begin(), spans.end(), [s](const ImageSpan& sp) { return sp.source == s; }));
}

void SequenceLayout::validate(std::size_t image_tokens) const {
  std::vector<bool> covered(tokens.size(), false);
  for (const auto& s : spans) {
    if (s.length != image_tokens)
      throw ContractError("layout: image span of length " + std::to_string(s.length) +
                          ", expected " + std::to_string(image_tokens));
    if (s.start + s.length > tokens.size())
      throw ContractError("layout: image span out of bounds");
    for (std::size_t i = s.start; i < s.start + s.length; ++i) {
      if (covered[i]) throw ContractError("layout: overlapping image spans");
      covered[i] = true;
    }
  }
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if ((tokens[i] == tokens::kImage) != covered[i])
      throw ContractError("layout: image placeholder at " + std::to_string(i) +
                          " not matched by a span");
  if (label_start > tokens.size()) throw ContractError("layout: label start out of bounds");
}

LayoutBuilder& LayoutBuilder::image(SpanSource source) {
  layout_.spans.push_back({layout_.tokens.size(), image_tokens_, source});
  layout_.tokens.insert(layout_.tokens.end(), image_tokens_, tokens::kImage);
  layout_.tokens.push_back(tokens::kImageSep);
  return *this;
}

LayoutBuilder& LayoutBuilder::text(std::span<const int> ids) {
  layout_.tokens.insert(layout_.tokens.end(), ids.begin(), ids.end());
  return *this;
}

LayoutBuilder& LayoutBuilder::token(int id) {
  layout_.tokens.push_back(id);
  return *this;
}

LayoutBuilder& LayoutBuilder::answer(std::span<const int> labels) {
  layout_.tokens.push_back(tokens::kAnswer);
  layout_.label_start = layout_.tokens.size();
  layout_.tokens.insert(layout_.tokens.end(), labels.begin(), labels.end());
  has_answer_ = true;
  return *this;
}

SequenceLayout LayoutBuilder::build() && {
  if (!has_answer_) layout_.label_start = layout_.tokens.size();
  return std::move(layout_);
}

SequenceLayout first_pass_layout(std::span<const int> query, std::size_t image_tokens,
                                 Ordering ordering) {
  LayoutBuilder b(image_tokens);
  if (ordering == Ordering::ImageFirst)
    b.image(SpanSource::Original).text(query);
  else
    b.text(query).image(SpanSource::Original);
  return std::move(b).build();
}

SequenceLayout answer_layout(std::span<const int> query, std::span<const int> labels,
                             std::size_t image_tokens, Ordering ordering,
                             SecondPassImages images) {
  LayoutBuilder b(image_tokens);
  auto add_images = [&] {
    switch (images) {
      case SecondPassImages::OriginalAndReasoned:
        b.image(SpanSource::Original).image(SpanSource::Reasoned);
        break;
      case SecondPassImages::ReasonedOnly:
        b.image(SpanSource::Reasoned);
        break;
      case SecondPassImages::OriginalTwice:
        b.image(SpanSource::Original).image(SpanSource::Original);
        break;
      case SecondPassImages::OriginalOnly:
        b.image(SpanSource::Original);
        break;
    }
  };
  if (ordering == Ordering::ImageFirst) {
    add_images();
    b.text(query);
  } else {
    b.text(query);
    add_images();
  }
  b.answer(labels);
  return std::move(b).build();
}

}  // namespace lvlm
