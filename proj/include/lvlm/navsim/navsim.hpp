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
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lvlm/datasets/sample.hpp"
#include "lvlm/datasets/scene.hpp"
#include "lvlm/datasets/vocab.hpp"
#include "lvlm/numerics/rng.hpp"
#include "lvlm/vision/image.hpp"

namespace lvlm {

inline constexpr double kForwardStep = 0.25;
inline constexpr double kRotateStep = 15.0;
inline constexpr std::size_t kDefaultMaxSteps = 50;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

enum class Action { Stay, Forward, RotateLeft, RotateRight, Malformed };

/// Schema value ("stay", "move_forward", ...); "malformed" for Malformed.
std::string_view action_name(Action a);
/// {"action": "<name>"} exactly. Requires a non-Malformed action.
std::string action_json(Action a);

/// First well-formed JSON object in the text whose "action" member is one of
/// the four schema values decides the action; otherwise Malformed. Never
/// throws.
Action parse_action(std::string_view text);

/// Maps any angle in degrees into [0, 360).
double normalize_heading(double degrees);

/// Agent pose and goal. Heading 0° points along +x and grows
/// counterclockwise. Rotations are stored as a turn count modulo 24 on top
/// of the initial heading, so 24 turns restore the heading exactly.
struct NavState {
  Vec2 position;
  double initial_heading = 0.0;
  int turns = 0;  // in [0, 24)
  Vec2 goal;
  std::size_t steps = 0;
  std::size_t max_steps = kDefaultMaxSteps;

  static NavState make(Vec2 position, double heading, Vec2 goal,
                       std::size_t max_steps = kDefaultMaxSteps);

  double heading() const;
  double goal_distance() const { return distance(position, goal); }
  bool terminated() const { return steps >= max_steps; }
  bool operator==(const NavState&) const = default;
};

/// One step. Forward moves 0.25 along the heading; rotations turn by 15°;
/// Stay and Malformed keep the pose. Every action consumes a step. Throws
/// ContractError once the step budget is spent.
NavState step(const NavState& state, Action a);

struct Landmark {
  Glyph glyph = Glyph::Square;
  Color color = Color::Red;
  Vec2 position;
};

/// Landmarks in the square [-extent, extent]²; one of them marks the goal.
struct NavWorld {
  double extent = 6.0;
  std::vector<Landmark> landmarks;
  std::size_t goal_landmark = 0;
};

struct Observation {
  ImageGrid image;
  std::string instruction;
};

inline constexpr std::size_t kNavImageSize = 24;

/// Top-down view at 24×24: landmarks as 3×3 glyphs, the goal as a white
/// pixel, the agent as a cyan pixel with a gray heading tick on the
/// neighbouring pixel. The instruction names the goal landmark.
Observation render_observation(const NavState& state, const NavWorld& world);

/// Pixel (row, col) holding a world point; row 0 is the top (+y) edge.
std::pair<std::size_t, std::size_t> world_to_pixel(Vec2 p, const NavWorld& world);

struct TraceEntry {
  std::size_t step = 0;
  Vec2 position;
  double heading = 0.0;
  Action action = Action::Stay;
  bool parsed_ok = false;
};

struct EpisodeResult {
  double initial_distance = 0.0;
  double final_distance = 0.0;
  std::vector<TraceEntry> trace;
  /// Set when the policy threw; the episode ends at that pose.
  std::optional<std::string> failure;
  NavState final_state;
};

using NavPolicy = std::function<std::string(const Observation&, const NavState&)>;

/// Observe, ask the policy, parse, step, until the step budget is spent.
EpisodeResult run_episode(const NavState& start, const NavWorld& world, const NavPolicy& policy);

/// Turns toward the goal while the bearing error exceeds 7.5°, moves
/// forward otherwise, and stays once within 0.125 of the goal.
Action oracle_action(const NavState& state);
NavPolicy oracle_policy();

struct Episode {
  NavState start;
  NavWorld world;
};

struct EpisodeSpec {
  double min_distance = 2.0;
  double max_distance = 8.0;
  std::size_t max_steps = kDefaultMaxSteps;
  std::size_t landmarks = 3;
};

/// Start pose on the 15° heading lattice and a goal at a uniformly drawn
/// distance in [min, max], both inside the world. The goal landmark sits on
/// the goal; the rest are scattered and never share the goal's pixel.
Episode sample_episode(const Rng& rng, const EpisodeSpec& spec = {});

/// Arithmetic mean of final distances.
double mean_final_distance(const std::vector<EpisodeResult>& results);

/// One record per line: {"step", "pose": {"x", "y", "heading"}, "action", "parsed_ok"}.
std::string trace_jsonl(const std::vector<TraceEntry>& trace);

/// Observation after a random number of oracle steps, labelled with the
/// oracle's next action as JSON.
Sample navigation_sample(const Rng& rng, const Vocabulary& vocab, const EpisodeSpec& spec = {});

}  // namespace lvlm
