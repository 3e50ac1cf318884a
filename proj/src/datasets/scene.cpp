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

#include "lvlm/datasets/scene.hpp"

#include <algorithm>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {
namespace {

std::array<bool, 36> parse_mask(const std::array<std::string_view, 6>& rows) {
  std::array<bool, 36> m{};
  for (std::size_t y = 0; y < 6; ++y)
    for (std::size_t x = 0; x < 6; ++x) m[y * 6 + x] = rows[y][x] == '#';
  return m;
}

bool satisfies(const SceneObject& o, const SceneObject& anchor, Relation r) {
  switch (r) {
    case Relation::LeftOf: return o.row == anchor.row && o.col < anchor.col;
    case Relation::RightOf: return o.row == anchor.row && o.col > anchor.col;
    case Relation::Above: return o.col == anchor.col && o.row < anchor.row;
    case Relation::Below: return o.col == anchor.col && o.row > anchor.row;
  }
  return false;
}

bool cell_shows(const ImageGrid& img, const SceneObject& o, std::size_t cell) {
  const auto rgb = color_rgb(o.color);
  for (std::size_t y = 0; y < cell; ++y)
    for (std::size_t x = 0; x < cell; ++x) {
      const std::size_t py = o.row * cell + y, px = o.col * cell + x;
      if (img.at(py, px, 0) == rgb[0] && img.at(py, px, 1) == rgb[1] && img.at(py, px, 2) == rgb[2])
        return true;
    }
  return false;
}

}  // namespace

std::string_view glyph_name(Glyph g) {
  switch (g) {
    case Glyph::Square: return "square";
    case Glyph::Circle: return "circle";
    case Glyph::Triangle: return "triangle";
    case Glyph::Cross: return "cross";
  }
  return "square";
}

std::string_view color_name(Color c) {
  switch (c) {
    case Color::Red: return "red";
    case Color::Green: return "green";
    case Color::Blue: return "blue";
    case Color::Yellow: return "yellow";
    case Color::Magenta: return "magenta";
    case Color::Cyan: return "cyan";
  }
  return "red";
}

std::array<float, 3> color_rgb(Color c) {
  switch (c) {
    case Color::Red: return {1, 0, 0};
    case Color::Green: return {0, 1, 0};
    case Color::Blue: return {0, 0, 1};
    case Color::Yellow: return {1, 1, 0};
    case Color::Magenta: return {1, 0, 1};
    case Color::Cyan: return {0, 1, 1};
  }
  return {0, 0, 0};
}

const std::array<bool, 36>& glyph_mask(Glyph g) {
  static const auto square = parse_mask({{"......", ".####.", ".####.", ".####.", ".####.", "......"}});
  static const auto circle = parse_mask({{"......", "..##..", ".####.", ".####.", "..##..", "......"}});
  static const auto triangle = parse_mask({{"......", "..##..", "..##..", ".####.", "######", "......"}});
  static const auto cross = parse_mask({{"..##..", "..##..", "######", "######", "..##..", "..##.."}});
  switch (g) {
    case Glyph::Square: return square;
    case Glyph::Circle: return circle;
    case Glyph::Triangle: return triangle;
    case Glyph::Cross: return cross;
  }
  return square;
}

ImageGrid Scene::render() const {
  if (spec.cell != 6) throw ConfigError("scene cells must be 6 pixels wide");
  const std::size_t side = spec.lattice * spec.cell;
  auto img = ImageGrid::blank(side, side);
  for (const auto& o : objects) {
    if (o.row >= spec.lattice || o.col >= spec.lattice)
      throw ContractError("scene object outside the lattice");
    const auto& mask = glyph_mask(o.glyph);
    const auto rgb = color_rgb(o.color);
    for (std::size_t y = 0; y < 6; ++y)
      for (std::size_t x = 0; x < 6; ++x) {
        if (!mask[y * 6 + x]) continue;
        for (std::size_t c = 0; c < 3; ++c) img.at(o.row * 6 + y, o.col * 6 + x, c) = rgb[c];
      }
  }
  return img;
}

std::string_view relation_phrase(Relation r) {
  switch (r) {
    case Relation::LeftOf: return "left of";
    case Relation::RightOf: return "right of";
    case Relation::Above: return "above";
    case Relation::Below: return "below";
  }
  return "";
}

std::string SceneQuestion::text(const Scene& scene) const {
  const auto anchor_name = std::string(glyph_name(scene.objects.at(anchor).glyph));
  if (!relation) return "what color is the " + anchor_name + " ?";
  return "what color is the shape " + std::string(relation_phrase(*relation)) + " the " +
         anchor_name + " ?";
}

std::vector<SceneQuestion> valid_questions(const Scene& scene) {
  std::vector<SceneQuestion> out;
  const auto& objs = scene.objects;
  for (std::size_t a = 0; a < objs.size(); ++a) {
    const auto same_glyph = std::count_if(objs.begin(), objs.end(), [&](const SceneObject& o) {
      return o.glyph == objs[a].glyph;
    });
    if (same_glyph != 1) continue;
    out.push_back({std::nullopt, a, a});
    for (auto r : {Relation::LeftOf, Relation::RightOf, Relation::Above, Relation::Below}) {
      std::vector<std::size_t> hits;
      for (std::size_t t = 0; t < objs.size(); ++t)
        if (t != a && satisfies(objs[t], objs[a], r)) hits.push_back(t);
      if (hits.size() == 1) out.push_back({r, a, hits.front()});
    }
  }
  return out;
}

SceneQa gen_scene(const Rng& rng, const SceneSpec& spec) {
  const std::size_t cells = spec.lattice * spec.lattice;
  if (spec.min_objects == 0 || spec.min_objects > spec.max_objects || spec.max_objects > cells)
    throw ConfigError("scene object counts must satisfy 1 <= min <= max <= cells");
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto r = rng.split(attempt);
    Scene scene{spec, {}};
    const std::size_t n =
        spec.min_objects + r.below(spec.max_objects - spec.min_objects + 1);
    for (auto cell : r.sample_without_replacement(cells, n)) {
      SceneObject o;
      o.row = cell / spec.lattice;
      o.col = cell % spec.lattice;
      o.glyph = kAllGlyphs[r.below(kAllGlyphs.size())];
      scene.objects.push_back(o);
    }
    auto questions = valid_questions(scene);
    if (n >= 2)
      std::erase_if(questions, [](const SceneQuestion& q) { return !q.relation.has_value(); });
    if (questions.empty()) continue;

    const auto q = questions[r.below(questions.size())];
    for (auto& o : scene.objects) o.color = kAllColors[r.below(kAllColors.size())];

    SceneQa qa{scene, scene.render(), q.text(scene),
               std::string(color_name(scene.objects[q.target].color))};
    if (!cell_shows(qa.image, scene.objects[q.target], spec.cell))
      throw ContractError("rendered scene does not show the answer color");
    return qa;
  }
}

std::string describe_scene(const Scene& scene) {
  auto objs = scene.objects;
  std::sort(objs.begin(), objs.end(), [](const SceneObject& a, const SceneObject& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::string out;
  for (const auto& o : objs) {
    if (!out.empty()) out += " and ";
    out += std::string(color_name(o.color)) + " " + std::string(glyph_name(o.glyph));
  }
  return out;
}

Sample scene_vqa_sample(const SceneQa& qa, const Vocabulary& vocab) {
  Sample s;
  s.image = qa.image;
  s.query = vocab.encode(qa.question);
  s.label = vocab.encode(qa.answer);
  s.task = Task::Vqa;
  return s;
}

Sample scene_describe_sample(const SceneQa& qa, const Vocabulary& vocab) {
  Sample s;
  s.image = qa.image;
  s.query = vocab.encode(kDescribePrompt);
  s.label = vocab.encode(describe_scene(qa.scene));
  s.task = Task::Describe;
  return s;
}

}  // namespace lvlm
