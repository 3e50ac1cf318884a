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

#include "lvlm/datasets/mcq.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lvlm/datasets/scene.hpp"
#include "lvlm/numerics/errors.hpp"

namespace lvlm {
namespace {

constexpr std::string_view kInactiveActions[] = {
    "stands still near the window", "waits near the door",   "sits on the bench",
    "watches the robot silently",   "looks at the phone",    "reads the book calmly",
    "leans on the wall",            "rests near the table",
};

constexpr std::string_view kInterveningActions[] = {
    "walks toward the robot",         "points at the door",
    "reaches for the box",            "picks up the cup",
    "talks to the robot while smiling", "waves the hand at the robot",
    "blocks the path of the robot",   "steps in front of the robot",
    "pushes the cart toward the robot", "holds up the sign",
    "gestures stop to the robot",     "hands the tool to the robot",
    "moves the chair away from the robot",
};

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size()))
    s.replace(at, from.size(), to);
}

}  // namespace

std::string_view position_name(Position p) { return p == Position::Left ? "left" : "right"; }
std::string_view role_name(Role r) { return r == Role::Inactive ? "inactive" : "intervening"; }

std::optional<Position> parse_position(std::string_view s) {
  if (s == "left") return Position::Left;
  if (s == "right") return Position::Right;
  return std::nullopt;
}

std::optional<Role> parse_role(std::string_view s) {
  if (s == "inactive") return Role::Inactive;
  if (s == "intervening") return Role::Intervening;
  return std::nullopt;
}

std::string normalize_caption(std::string_view text) {
  std::string s(text);
  replace_all(s, "left person", "{POS} person");
  replace_all(s, "right person", "{POS} person");
  return s;
}

std::string instantiate_caption(std::string_view templ, Position p) {
  std::string s(templ);
  replace_all(s, kPositionPlaceholder, position_name(p));
  return s;
}

std::vector<Caption> generate_hri_captions(const Rng& rng, std::size_t events) {
  std::vector<Caption> out;
  out.reserve(2 * events);
  for (std::size_t e = 0; e < events; ++e) {
    auto r = rng.split(e);
    const auto inactive_side = r.below(2) == 0 ? Position::Left : Position::Right;
    const auto other = inactive_side == Position::Left ? Position::Right : Position::Left;
    const auto& a = kInactiveActions[r.below(std::size(kInactiveActions))];
    const auto& b = kInterveningActions[r.below(std::size(kInterveningActions))];
    const int id = static_cast<int>(e);
    out.push_back({id, Role::Inactive, inactive_side,
                   "the " + std::string(position_name(inactive_side)) + " person " + std::string(a)});
    out.push_back({id, Role::Intervening, other,
                   "the " + std::string(position_name(other)) + " person " + std::string(b)});
  }
  return out;
}

bool McqItem::valid() const {
  if (correct < 0 || correct >= 4) return false;
  std::set<std::string> distinct(options.begin(), options.end());
  if (distinct.size() != 4) return false;
  auto clean = [](const std::string& s) { return s.find(kPositionPlaceholder) == std::string::npos; };
  return clean(question) && std::all_of(options.begin(), options.end(), clean);
}

std::vector<McqItem> build_mcq(const std::vector<Caption>& captions, const Rng& rng) {
  std::vector<std::string> pool;
  std::map<std::string, std::size_t> pool_index;
  std::vector<std::size_t> template_of;
  for (const auto& c : captions) {
    auto t = normalize_caption(c.text);
    auto [it, fresh] = pool_index.emplace(t, pool.size());
    if (fresh) pool.push_back(t);
    template_of.push_back(it->second);
  }
  if (pool.size() < 4)
    throw McqError("caption pool has " + std::to_string(pool.size()) +
                   " distinct templates; four-option items need at least 4");

  std::vector<McqItem> items;
  items.reserve(captions.size());
  for (std::size_t i = 0; i < captions.size(); ++i) {
    auto r = rng.split(i);
    const auto& c = captions[i];
    std::vector<std::size_t> others;
    for (std::size_t t = 0; t < pool.size(); ++t)
      if (t != template_of[i]) others.push_back(t);
    std::vector<std::size_t> chosen;
    for (auto k : r.sample_without_replacement(others.size(), 3)) chosen.push_back(others[k]);
    const auto slot = static_cast<std::size_t>(r.below(4));
    chosen.insert(chosen.begin() + static_cast<std::ptrdiff_t>(slot), template_of[i]);

    McqItem item;
    item.question = "which option describes the " + std::string(role_name(c.role)) + " person ?";
    for (std::size_t k = 0; k < 4; ++k) item.options[k] = instantiate_caption(pool[chosen[k]], c.position);
    item.correct = static_cast<int>(slot);
    item.event_id = c.event_id;
    item.target = c.role;
    item.position = c.position;
    if (!item.valid()) throw McqError("built an invalid item for caption " + std::to_string(i));
    items.push_back(std::move(item));
  }
  return items;
}

std::optional<int> parse_option(std::string_view answer) {
  for (const auto& w : split_words(answer)) {
    if (w.size() != 1) continue;
    if (w[0] >= 'a' && w[0] <= 'd') return w[0] - 'a';
    if (w[0] >= '1' && w[0] <= '4') return w[0] - '1';
  }
  return std::nullopt;
}

bool score_mcq(std::string_view answer, const McqItem& item) {
  auto picked = parse_option(answer);
  return picked && *picked == item.correct;
}

double overlap_score(std::string_view generated, std::string_view reference) {
  auto ref = split_words(reference);
  if (ref.empty()) throw ContractError("overlap_score: empty reference");
  auto gen = split_words(generated);
  if (gen.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& w : ref) ++counts[w];
  double common = 0.0;
  for (const auto& w : gen) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      common += 1.0;
    }
  }
  if (common == 0.0) return 0.0;
  const double precision = common / static_cast<double>(gen.size());
  const double recall = common / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

ImageGrid render_event(const std::vector<Caption>& captions, int event_id) {
  Scene scene;
  scene.spec.min_objects = scene.spec.max_objects = 2;
  for (const auto& c : captions) {
    if (c.event_id != event_id) continue;
    SceneObject o;
    o.glyph = c.role == Role::Inactive ? Glyph::Square : Glyph::Cross;
    o.color = kAllColors[fnv1a64(normalize_caption(c.text)) % kAllColors.size()];
    o.row = 1;
    o.col = c.position == Position::Left ? 0 : 3;
    scene.objects.push_back(o);
  }
  if (scene.objects.empty())
    throw ContractError("no captions for event " + std::to_string(event_id));
  return scene.render();
}

Sample mcq_sample(const McqItem& item, const ImageGrid& image, const Vocabulary& vocab) {
  std::string query = item.question;
  for (std::size_t k = 0; k < 4; ++k)
    query += " " + std::string(kOptionLetters[k]) + " " + item.options[k];
  Sample s;
  s.image = image;
  s.query = vocab.encode(query);
  s.label = {vocab.id(kOptionLetters[static_cast<std::size_t>(item.correct)])};
  s.task = Task::Mcq;
  s.options.assign(item.options.begin(), item.options.end());
  s.correct_option = item.correct;
  return s;
}

}  // namespace lvlm
