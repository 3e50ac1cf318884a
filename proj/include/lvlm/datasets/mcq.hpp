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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lvlm/datasets/sample.hpp"
#include "lvlm/datasets/vocab.hpp"
#include "lvlm/numerics/rng.hpp"
#include "lvlm/vision/image.hpp"

namespace lvlm {

enum class Position { Left, Right };
/// The person who stays passive and the one who interacts with the robot.
enum class Role { Inactive, Intervening };

std::string_view position_name(Position p);
std::string_view role_name(Role r);
std::optional<Position> parse_position(std::string_view s);
std::optional<Role> parse_role(std::string_view s);

/// One annotated person in a two-person interaction event.
struct Caption {
  int event_id = 0;
  Role role = Role::Inactive;
  Position position = Position::Left;
  std::string text;  // e.g. "the left person waits near the door"
  bool operator==(const Caption&) const = default;
};

inline constexpr std::string_view kPositionPlaceholder = "{POS}";

/// Replaces "left person" / "right person" with "{POS} person".
std::string normalize_caption(std::string_view text);
/// Fills every "{POS}" with the position word.
std::string instantiate_caption(std::string_view templ, Position p);

/// Synthetic interaction events: each has one inactive and one intervening
/// person on opposite sides, so `events` events give 2·events captions.
std::vector<Caption> generate_hri_captions(const Rng& rng, std::size_t events = 188);

struct McqItem {
  std::string question;
  std::array<std::string, 4> options;
  int correct = 0;
  int event_id = 0;
  Role target = Role::Inactive;
  Position position = Position::Left;

  /// Options pairwise distinct, correct index in [0, 4), no placeholder
  /// left in any field.
  bool valid() const;
  bool operator==(const McqItem&) const = default;
};

class McqError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two passes over the captions: first every caption is normalized into a
/// pool of distinct templates; then each caption becomes one item with its
/// own template and three distractor templates drawn without replacement,
/// all instantiated with the caption's position, in a uniformly drawn
/// order. Item i draws from rng.split(i). Throws McqError when the pool
/// has fewer than four templates.
std::vector<McqItem> build_mcq(const std::vector<Caption>& captions, const Rng& rng);

inline constexpr std::array<std::string_view, 4> kOptionLetters = {"a", "b", "c", "d"};

/// Index picked by the first standalone option letter (a-d) or number
/// (1-4) in the answer text.
std::optional<int> parse_option(std::string_view answer);
bool score_mcq(std::string_view answer, const McqItem& item);

/// Multiset token F1 after lowercasing. Throws ContractError for an empty
/// reference.
double overlap_score(std::string_view generated, std::string_view reference);

/// Two figures on a 24×24 canvas at the captions' positions; fill color
/// follows the caption template, body glyph follows the role.
ImageGrid render_event(const std::vector<Caption>& captions, int event_id);

/// Query "<question> a <option> b <option> ..." with the correct letter as
/// the label.
Sample mcq_sample(const McqItem& item, const ImageGrid& image, const Vocabulary& vocab);

}  // namespace lvlm
