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

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lvlm/datasets/sample.hpp"
#include "lvlm/datasets/vocab.hpp"
#include "lvlm/numerics/rng.hpp"
#include "lvlm/vision/image.hpp"

namespace lvlm {

enum class Glyph { Square, Circle, Triangle, Cross };
enum class Color { Red, Green, Blue, Yellow, Magenta, Cyan };

inline constexpr std::array<Glyph, 4> kAllGlyphs = {Glyph::Square, Glyph::Circle,
                                                    Glyph::Triangle, Glyph::Cross};
inline constexpr std::array<Color, 6> kAllColors = {Color::Red,    Color::Green,   Color::Blue,
                                                    Color::Yellow, Color::Magenta, Color::Cyan};

std::string_view glyph_name(Glyph g);
std::string_view color_name(Color c);
std::array<float, 3> color_rgb(Color c);

/// 6×6 boolean mask of a glyph, row-major.
const std::array<bool, 36>& glyph_mask(Glyph g);

struct SceneObject {
  Glyph glyph = Glyph::Square;
  Color color = Color::Red;
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const SceneObject&) const = default;
};

struct SceneSpec {
  std::size_t lattice = 4;  // cells per side
  std::size_t cell = 6;     // pixels per cell side
  std::size_t min_objects = 2;
  std::size_t max_objects = 4;
};

/// Objects on a lattice, at most one per cell, drawn on black.
struct Scene {
  SceneSpec spec;
  std::vector<SceneObject> objects;

  ImageGrid render() const;
};

enum class Relation { LeftOf, RightOf, Above, Below };

std::string_view relation_phrase(Relation r);

/// "what color is the <glyph> ?" when `relation` is empty, otherwise
/// "what color is the shape <relation> the <glyph> ?". The anchor glyph is
/// unique in the scene and exactly one object stands in the relation to
/// it, sharing its row (left/right) or column (above/below).
struct SceneQuestion {
  std::optional<Relation> relation;
  std::size_t anchor = 0;  // object index
  std::size_t target = 0;  // object index; equals anchor without a relation

  std::string text(const Scene& scene) const;
  bool operator==(const SceneQuestion&) const = default;
};

/// Every answerable question about the scene's geometry.
std::vector<SceneQuestion> valid_questions(const Scene& scene);

struct SceneQa {
  Scene scene;
  ImageGrid image;
  std::string question;
  std::string answer;  // one color word
};

/// Places objects, picks a question uniformly among the valid ones
/// (relational ones only when there are two or more objects), then draws
/// every color. Geometry without a valid question is redrawn from the next
/// substream. The rendered target cell is checked to show the answer color.
SceneQa gen_scene(const Rng& rng, const SceneSpec& spec = {});

/// "<color> <glyph> and <color> <glyph> ..." in row-major cell order.
std::string describe_scene(const Scene& scene);

Sample scene_vqa_sample(const SceneQa& qa, const Vocabulary& vocab);
Sample scene_describe_sample(const SceneQa& qa, const Vocabulary& vocab);

inline constexpr std::string_view kDescribePrompt = "describe the scene .";

}  // namespace lvlm
