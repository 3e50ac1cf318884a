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

#include "lvlm/navsim/navsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "lvlm/numerics/errors.hpp"

namespace lvlm {
namespace {

using nlohmann::json;

// Exact on multiples of 90° so axis-aligned moves carry no rounding residue.
double cos_deg(double deg) {
  const double r = normalize_heading(deg);
  if (r == 0.0) return 1.0;
  if (r == 90.0 || r == 270.0) return 0.0;
  if (r == 180.0) return -1.0;
  return std::cos(r * std::numbers::pi / 180.0);
}

double sin_deg(double deg) { return cos_deg(deg - 90.0); }

// Index one past the brace closing the object opened at `open`, or npos.
std::size_t match_object(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<Action> action_from_name(std::string_view s) {
  for (auto a : {Action::Stay, Action::Forward, Action::RotateLeft, Action::RotateRight})
    if (action_name(a) == s) return a;
  return std::nullopt;
}

const std::array<bool, 9>& landmark_mask(Glyph g) {
  static constexpr std::array<bool, 9> square = {1, 1, 1, 1, 1, 1, 1, 1, 1};
  static constexpr std::array<bool, 9> circle = {0, 1, 0, 1, 0, 1, 0, 1, 0};
  static constexpr std::array<bool, 9> triangle = {0, 1, 0, 1, 1, 1, 1, 1, 1};
  static constexpr std::array<bool, 9> cross = {0, 1, 0, 1, 1, 1, 0, 1, 0};
  switch (g) {
    case Glyph::Square: return square;
    case Glyph::Circle: return circle;
    case Glyph::Triangle: return triangle;
    case Glyph::Cross: return cross;
  }
  return square;
}

void paint(ImageGrid& img, long row, long col, std::array<float, 3> rgb) {
  if (row < 0 || col < 0 || row >= static_cast<long>(img.height) ||
      col >= static_cast<long>(img.width))
    return;
  for (std::size_t c = 0; c < 3; ++c)
    img.at(static_cast<std::size_t>(row), static_cast<std::size_t>(col), c) = rgb[c];
}

// Landmarks avoid cyan, which marks the agent.
constexpr std::array<Color, 5> kLandmarkColors = {Color::Red, Color::Green, Color::Blue,
                                                  Color::Yellow, Color::Magenta};

}  // namespace

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Stay: return "stay";
    case Action::Forward: return "move_forward";
    case Action::RotateLeft: return "rotate_left";
    case Action::RotateRight: return "rotate_right";
    case Action::Malformed: return "malformed";
  }
  return "malformed";
}

std::string action_json(Action a) {
  if (a == Action::Malformed) throw ContractError("malformed actions have no JSON form");
  return "{\"action\": \"" + std::string(action_name(a)) + "\"}";
}

Action parse_action(std::string_view text) {
  try {
    for (std::size_t open = text.find('{'); open != std::string_view::npos;
         open = text.find('{', open + 1)) {
      const auto close = match_object(text, open);
      if (close == std::string_view::npos) continue;
      auto obj = json::parse(text.substr(open, close - open), nullptr, /*allow_exceptions=*/false);
      if (!obj.is_object()) continue;
      auto it = obj.find("action");
      if (it == obj.end() || !it->is_string()) continue;
      if (auto a = action_from_name(it->get<std::string>())) return *a;
    }
  } catch (...) {
  }
  return Action::Malformed;
}

double normalize_heading(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;
  return r;
}

NavState NavState::make(Vec2 position, double heading, Vec2 goal, std::size_t max_steps) {
  NavState s;
  s.position = position;
  s.initial_heading = normalize_heading(heading);
  s.goal = goal;
  s.max_steps = max_steps;
  return s;
}

double NavState::heading() const {
  return normalize_heading(initial_heading + kRotateStep * static_cast<double>(turns));
}

NavState step(const NavState& state, Action a) {
  if (state.terminated())
    throw ContractError("step: episode already used its " + std::to_string(state.max_steps) +
                        " steps");
  NavState next = state;
  switch (a) {
    case Action::Forward: {
      const double h = state.heading();
      next.position.x += kForwardStep * cos_deg(h);
      next.position.y += kForwardStep * sin_deg(h);
      break;
    }
    case Action::RotateLeft: next.turns = (state.turns + 1) % 24; break;
    case Action::RotateRight: next.turns = (state.turns + 23) % 24; break;
    case Action::Stay:
    case Action::Malformed: break;
  }
  ++next.steps;
  return next;
}

std::pair<std::size_t, std::size_t> world_to_pixel(Vec2 p, const NavWorld& world) {
  const double n = static_cast<double>(kNavImageSize);
  auto cell = [&](double v) {
    const double f = std::floor((v + world.extent) / (2.0 * world.extent) * n);
    return static_cast<std::size_t>(std::clamp(f, 0.0, n - 1.0));
  };
  return {kNavImageSize - 1 - cell(p.y), cell(p.x)};
}

Observation render_observation(const NavState& state, const NavWorld& world) {
  Observation obs;
  obs.image = ImageGrid::blank(kNavImageSize, kNavImageSize);
  for (const auto& lm : world.landmarks) {
    const auto [r, c] = world_to_pixel(lm.position, world);
    const auto& mask = landmark_mask(lm.glyph);
    for (long dy = -1; dy <= 1; ++dy)
      for (long dx = -1; dx <= 1; ++dx)
        if (mask[static_cast<std::size_t>((dy + 1) * 3 + dx + 1)])
          paint(obs.image, static_cast<long>(r) + dy, static_cast<long>(c) + dx, color_rgb(lm.color));
  }
  const auto [gr, gc] = world_to_pixel(state.goal, world);
  paint(obs.image, static_cast<long>(gr), static_cast<long>(gc), {1, 1, 1});

  const auto [ar, ac] = world_to_pixel(state.position, world);
  const double h = state.heading();
  const long tick_dx = std::lround(cos_deg(h));
  const long tick_dy = std::lround(sin_deg(h));
  paint(obs.image, static_cast<long>(ar) - tick_dy, static_cast<long>(ac) + tick_dx,
        {0.5f, 0.5f, 0.5f});
  paint(obs.image, static_cast<long>(ar), static_cast<long>(ac), color_rgb(Color::Cyan));

  if (world.goal_landmark < world.landmarks.size()) {
    const auto& g = world.landmarks[world.goal_landmark];
    obs.instruction = "navigate to the " + std::string(color_name(g.color)) + " " +
                      std::string(glyph_name(g.glyph)) + " . reply with json .";
  } else {
    obs.instruction = "navigate to the goal . reply with json .";
  }
  return obs;
}

EpisodeResult run_episode(const NavState& start, const NavWorld& world, const NavPolicy& policy) {
  if (start.max_steps == 0) throw ContractError("run_episode: max_steps must be at least 1");
  EpisodeResult result;
  result.initial_distance = start.goal_distance();
  NavState state = start;
  while (!state.terminated()) {
    auto obs = render_observation(state, world);
    std::string text;
    try {
      text = policy(obs, state);
    } catch (const std::exception& e) {
      result.failure = e.what();
      break;
    } catch (...) {
      result.failure = "policy raised a non-standard exception";
      break;
    }
    const Action a = parse_action(text);
    state = step(state, a);
    result.trace.push_back({state.steps, state.position, state.heading(), a, a != Action::Malformed});
  }
  result.final_state = state;
  result.final_distance = state.goal_distance();
  return result;
}

Action oracle_action(const NavState& state) {
  const double d = state.goal_distance();
  if (d < kForwardStep / 2.0) return Action::Stay;
  const double bearing = std::atan2(state.goal.y - state.position.y, state.goal.x - state.position.x) *
                         180.0 / std::numbers::pi;
  double diff = normalize_heading(bearing - state.heading());
  if (diff > 180.0) diff -= 360.0;
  if (diff > kRotateStep / 2.0) return Action::RotateLeft;
  if (diff < -kRotateStep / 2.0) return Action::RotateRight;
  return Action::Forward;
}

NavPolicy oracle_policy() {
  return [](const Observation&, const NavState& s) { return action_json(oracle_action(s)); };
}

Episode sample_episode(const Rng& rng, const EpisodeSpec& spec) {
  if (!(spec.min_distance >= 0.0 && spec.min_distance <= spec.max_distance))
    throw ConfigError("episode distances must satisfy 0 <= min <= max");
  Episode ep;
  const double bound = ep.world.extent - 1.0;
  if (spec.max_distance > 2.0 * std::sqrt(2.0) * bound)
    throw ConfigError("episode max distance does not fit in the world");
  auto r = rng.split("pose");
  for (;;) {
    const Vec2 start{r.uniform(-bound, bound), r.uniform(-bound, bound)};
    const double d = r.uniform(spec.min_distance, spec.max_distance);
    const double angle = r.uniform(0.0, 2.0 * std::numbers::pi);
    const Vec2 goal{start.x + d * std::cos(angle), start.y + d * std::sin(angle)};
    const double heading = kRotateStep * static_cast<double>(r.below(24));
    if (std::abs(goal.x) > bound || std::abs(goal.y) > bound) continue;
    ep.start = NavState::make(start, heading, goal, spec.max_steps);
    break;
  }

  auto lr = rng.split("landmarks");
  const std::size_t n = std::max<std::size_t>(spec.landmarks, 1);
  ep.world.goal_landmark = static_cast<std::size_t>(lr.below(n));
  const auto goal_px = world_to_pixel(ep.start.goal, ep.world);
  for (std::size_t i = 0; i < n; ++i) {
    Landmark lm;
    lm.glyph = kAllGlyphs[lr.below(kAllGlyphs.size())];
    lm.color = kLandmarkColors[lr.below(kLandmarkColors.size())];
    if (i == ep.world.goal_landmark) {
      lm.position = ep.start.goal;
    } else {
      do {
        lm.position = {lr.uniform(-bound, bound), lr.uniform(-bound, bound)};
      } while (world_to_pixel(lm.position, ep.world) == goal_px);
    }
    ep.world.landmarks.push_back(lm);
  }
  return ep;
}

double mean_final_distance(const std::vector<EpisodeResult>& results) {
  if (results.empty()) throw ContractError("mean_final_distance: no episodes");
  double total = 0.0;
  for (const auto& r : results) total += r.final_distance;
  return total / static_cast<double>(results.size());
}

std::string trace_jsonl(const std::vector<TraceEntry>& trace) {
  std::ostringstream os;
  for (const auto& t : trace) {
    json rec = {{"step", t.step},
                {"pose", {{"x", t.position.x}, {"y", t.position.y}, {"heading", t.heading}}},
                {"action", action_name(t.action)},
                {"parsed_ok", t.parsed_ok}};
    os << rec.dump() << '\n';
  }
  return os.str();
}

Sample navigation_sample(const Rng& rng, const Vocabulary& vocab, const EpisodeSpec& spec) {
  auto ep = sample_episode(rng.split("episode"), spec);
  auto r = rng.split("progress");
  NavState state = ep.start;
  const auto warmup = r.below(std::min<std::size_t>(spec.max_steps, 24));
  for (std::uint64_t i = 0; i < warmup; ++i) state = step(state, oracle_action(state));
  auto obs = render_observation(state, ep.world);
  Sample s;
  s.image = std::move(obs.image);
  s.query = vocab.encode(obs.instruction);
  s.label = vocab.encode(action_json(oracle_action(state)));
  s.task = Task::Navigate;
  return s;
}

}  // namespace lvlm
