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

#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <unistd.h>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lvlm/datasets/io.hpp"
#include "lvlm/datasets/mcq.hpp"
#include "lvlm/datasets/scene.hpp"
#include "lvlm/datasets/vocab.hpp"
#include "lvlm/lm/layout.hpp"
#include "lvlm/numerics/errors.hpp"

namespace lvlm {
namespace {

TEST(Tokenizer, SplitsPunctuationAndKeepsQuotedStrings) {
  EXPECT_EQ(split_words("What color is the Square?"),
            (std::vector<std::string>{"what", "color", "is", "the", "square", "?"}));
  EXPECT_EQ(split_words(R"({"action": "move_forward"})"),
            (std::vector<std::string>{"{", "\"action\"", ":", "\"move_forward\"", "}"}));
  EXPECT_EQ(split_words("  "), std::vector<std::string>{});
  EXPECT_EQ(split_words("\"open"), std::vector<std::string>{"\"open\""});
}

TEST(Tokenizer, FixedWordsRoundTrip) {
  Vocabulary v(512);
  EXPECT_EQ(v.id("a"), tokens::kNumSpecial);
  const std::string text = "which option describes the left person ? a b c d";
  EXPECT_EQ(v.decode(v.encode(text)), text);
  const std::string action = R"({ "action" : "rotate_left" })";
  EXPECT_EQ(v.decode(v.encode(action)), action);
}

TEST(Tokenizer, UnknownWordsHashAboveTheFixedTable) {
  Vocabulary v(512);
  const int id = v.id("zebra");
  EXPECT_GE(id, 256);
  EXPECT_LT(id, 512);
  EXPECT_EQ(v.id("zebra"), id);
  EXPECT_EQ(v.word(id), "<w" + std::to_string(id) + ">");
  Vocabulary small(200);
  EXPECT_EQ(small.id("zebra"), tokens::kUnknown);
  EXPECT_THROW(Vocabulary(40), ConfigError);
  EXPECT_THROW(v.word(512), ContractError);
}

TEST(Tokenizer, DecodeDropsControlTokens) {
  Vocabulary v(512);
  std::vector<int> ids{tokens::kAnswer, v.id("red"), tokens::kEos, tokens::kPad};
  EXPECT_EQ(v.decode(ids), "red");
  EXPECT_EQ(v.decode(std::vector<int>{tokens::kUnknown}), "<unk>");
}

TEST(Scene, SingleObjectAsksForItsColor) {
  Scene scene;
  scene.objects = {{Glyph::Square, Color::Red, 2, 1}};
  auto qs = valid_questions(scene);
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0].text(scene), "what color is the square ?");
  EXPECT_EQ(color_name(scene.objects[qs[0].target].color), "red");

  SceneSpec one;
  one.min_objects = one.max_objects = 1;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto qa = gen_scene(Rng(s), one);
    ASSERT_EQ(qa.scene.objects.size(), 1u);
    EXPECT_EQ(qa.question, "what color is the " +
                               std::string(glyph_name(qa.scene.objects[0].glyph)) + " ?");
    EXPECT_EQ(qa.answer, color_name(qa.scene.objects[0].color));
  }
}

TEST(Scene, RelationsNeedAUniqueAnchorAndTarget) {
  Scene scene;
  // Row 0: circle, square, cross. Column 1: square over triangle.
  scene.objects = {{Glyph::Circle, Color::Red, 0, 0},
                   {Glyph::Square, Color::Blue, 0, 1},
                   {Glyph::Cross, Color::Green, 0, 3},
                   {Glyph::Triangle, Color::Cyan, 2, 1}};
  auto qs = valid_questions(scene);
  auto has = [&](std::string_view text, std::size_t target) {
    for (const auto& q : qs)
      if (q.text(scene) == text) return q.target == target;
    return false;
  };
  EXPECT_TRUE(has("what color is the shape left of the square ?", 0));
  EXPECT_TRUE(has("what color is the shape right of the square ?", 2));
  EXPECT_TRUE(has("what color is the shape below the square ?", 3));
  EXPECT_TRUE(has("what color is the shape above the triangle ?", 1));
  EXPECT_FALSE(has("what color is the shape above the square ?", 0));
  // The cross has two shapes to its left.
  for (const auto& q : qs)
    EXPECT_NE(q.text(scene), "what color is the shape left of the cross ?");

  scene.objects.push_back({Glyph::Square, Color::Red, 3, 3});
  for (const auto& q : valid_questions(scene))
    EXPECT_NE(scene.objects[q.anchor].glyph, Glyph::Square);
}

TEST(Scene, GeneratedQuestionsHoldInThePixels) {
  Vocabulary vocab(512);
  for (std::uint64_t s = 0; s < 500; ++s) {
    auto qa = gen_scene(Rng(s));
    const auto& objs = qa.scene.objects;
    ASSERT_GE(objs.size(), 2u);
    ASSERT_LE(objs.size(), 4u);
    EXPECT_NE(qa.question.find("shape "), std::string::npos) << qa.question;
    EXPECT_EQ(qa.image, qa.scene.render());

    // Re-derive the answer from the question text and the pixels alone.
    const auto qs = valid_questions(qa.scene);
    auto match = std::find_if(qs.begin(), qs.end(), [&](const SceneQuestion& q) {
      return q.text(qa.scene) == qa.question;
    });
    ASSERT_NE(match, qs.end());
    const auto& target = objs[match->target];
    const auto rgb = color_rgb(target.color);
    EXPECT_EQ(qa.answer, color_name(target.color));
    int lit = 0;
    for (std::size_t y = 0; y < 6; ++y)
      for (std::size_t x = 0; x < 6; ++x)
        lit += qa.image.at(target.row * 6 + y, target.col * 6 + x, 0) == rgb[0] &&
               qa.image.at(target.row * 6 + y, target.col * 6 + x, 1) == rgb[1] &&
               qa.image.at(target.row * 6 + y, target.col * 6 + x, 2) == rgb[2];
    EXPECT_GT(lit, 0);

    auto sample = scene_vqa_sample(qa, vocab);
    EXPECT_EQ(sample.label.size(), 1u);
    for (int id : sample.query) EXPECT_LT(id, 256);
  }
}

TEST(Scene, DeterministicPerSeed) {
  auto a = gen_scene(Rng(42));
  auto b = gen_scene(Rng(42));
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.question, b.question);
  EXPECT_EQ(a.answer, b.answer);
  EXPECT_EQ(a.scene.objects, b.scene.objects);
}

TEST(Scene, AnswerColorsAreUniform) {
  std::map<std::string, int> counts;
  const int n = 10000;
  Rng root(2024);
  for (int i = 0; i < n; ++i) ++counts[gen_scene(root.split(static_cast<std::uint64_t>(i))).answer];
  ASSERT_EQ(counts.size(), kAllColors.size());
  const double expected = static_cast<double>(n) / kAllColors.size();
  for (const auto& [color, c] : counts) EXPECT_LT(std::abs(c - expected) / expected, 0.10) << color;
}

TEST(Scene, DescriptionListsObjectsInCellOrder) {
  Scene scene;
  scene.objects = {{Glyph::Cross, Color::Blue, 1, 0}, {Glyph::Circle, Color::Yellow, 0, 2}};
  EXPECT_EQ(describe_scene(scene), "yellow circle and blue cross");
  Vocabulary vocab(512);
  SceneQa qa{scene, scene.render(), "", ""};
  auto s = scene_describe_sample(qa, vocab);
  EXPECT_EQ(vocab.decode(s.label), "yellow circle and blue cross");
  EXPECT_EQ(s.task, Task::Describe);
}

TEST(Captions, NormalizeAndReinstantiate) {
  EXPECT_EQ(normalize_caption("the left person waits"), "the {POS} person waits");
  EXPECT_EQ(normalize_caption("the right person waits"), "the {POS} person waits");
  EXPECT_EQ(instantiate_caption("the {POS} person waits", Position::Left), "the left person waits");
  EXPECT_EQ(instantiate_caption("the {POS} person waits", Position::Right),
            "the right person waits");
}

TEST(Captions, TwoRolesPerEventOnOppositeSides) {
  auto caps = generate_hri_captions(Rng(3));
  ASSERT_EQ(caps.size(), 376u);
  Vocabulary vocab(512);
  for (std::size_t i = 0; i < caps.size(); i += 2) {
    EXPECT_EQ(caps[i].event_id, caps[i + 1].event_id);
    EXPECT_EQ(caps[i].role, Role::Inactive);
    EXPECT_EQ(caps[i + 1].role, Role::Intervening);
    EXPECT_NE(caps[i].position, caps[i + 1].position);
    for (const auto* c : {&caps[i], &caps[i + 1]}) {
      EXPECT_NE(c->text.find(std::string(position_name(c->position)) + " person"),
                std::string::npos);
      for (const auto& w : split_words(c->text)) EXPECT_TRUE(vocab.is_fixed(w)) << w;
    }
  }
}

TEST(Mcq, BuildsTwoItemsPerEvent) {
  auto caps = generate_hri_captions(Rng(4));
  auto items = build_mcq(caps, Rng(5));
  ASSERT_EQ(items.size(), 376u);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    EXPECT_TRUE(it.valid());
    EXPECT_EQ(it.options[static_cast<std::size_t>(it.correct)], caps[i].text);
    EXPECT_EQ(it.event_id, caps[i].event_id);
    EXPECT_EQ(it.target, caps[i].role);
    // Distractors carry the item's own position.
    for (const auto& o : it.options)
      EXPECT_EQ(o.rfind("the " + std::string(position_name(it.position)) + " person", 0), 0u) << o;
  }
}

TEST(Mcq, PureFunctionOfCaptionsAndSeed) {
  auto caps = generate_hri_captions(Rng(6));
  EXPECT_EQ(build_mcq(caps, Rng(7)), build_mcq(caps, Rng(7)));
  EXPECT_NE(build_mcq(caps, Rng(7)), build_mcq(caps, Rng(8)));
}

TEST(Mcq, CorrectSlotIsUniform) {
  auto caps = generate_hri_captions(Rng(9), 5000);
  auto items = build_mcq(caps, Rng(10));
  ASSERT_EQ(items.size(), 10000u);
  std::array<int, 4> slots{};
  for (const auto& it : items) ++slots[static_cast<std::size_t>(it.correct)];
  for (int c : slots) EXPECT_LT(std::abs(c / 10000.0 - 0.25), 0.03);
}

TEST(Mcq, SmallPoolIsAnError) {
  std::vector<Caption> caps = {{0, Role::Inactive, Position::Left, "the left person waits"},
                               {0, Role::Intervening, Position::Right, "the right person waves"},
                               {1, Role::Inactive, Position::Right, "the right person waits"},
                               {1, Role::Intervening, Position::Left, "the left person sits"}};
  EXPECT_THROW(build_mcq(caps, Rng(1)), McqError);
  caps.push_back({2, Role::Inactive, Position::Left, "the left person reads"});
  auto items = build_mcq(caps, Rng(1));
  EXPECT_EQ(items.size(), 5u);
  for (const auto& it : items) EXPECT_TRUE(it.valid());
}

TEST(Mcq, ItemValidity) {
  McqItem it;
  it.question = "which option describes the inactive person ?";
  it.options = {"w", "x", "y", "z"};
  it.correct = 2;
  EXPECT_TRUE(it.valid());
  it.options[3] = "w";
  EXPECT_FALSE(it.valid());
  it.options[3] = "the {POS} person waits";
  EXPECT_FALSE(it.valid());
  it.options[3] = "z";
  it.correct = 4;
  EXPECT_FALSE(it.valid());
}

TEST(Mcq, Scoring) {
  McqItem it;
  it.correct = 1;
  EXPECT_TRUE(score_mcq("b", it));
  EXPECT_TRUE(score_mcq("B.", it));
  EXPECT_TRUE(score_mcq("answer : 2", it));
  EXPECT_FALSE(score_mcq("c", it));
  EXPECT_FALSE(score_mcq("", it));
  EXPECT_FALSE(score_mcq("none of them", it));
}

TEST(Mcq, RandomAnsweringScoresChance) {
  auto caps = generate_hri_captions(Rng(11), 2500);
  auto items = build_mcq(caps, Rng(12));
  Rng guess(13);
  int correct = 0;
  for (const auto& it : items) correct += score_mcq(kOptionLetters[guess.below(4)], it);
  EXPECT_LT(std::abs(correct / static_cast<double>(items.size()) - 0.25), 0.03);
}

TEST(Mcq, SampleEncodesQuestionAndOptions) {
  auto caps = generate_hri_captions(Rng(14), 4);
  auto items = build_mcq(caps, Rng(15));
  Vocabulary vocab(512);
  auto img = render_event(caps, items[0].event_id);
  auto s = mcq_sample(items[0], img, vocab);
  EXPECT_EQ(s.task, Task::Mcq);
  EXPECT_EQ(s.options.size(), 4u);
  EXPECT_EQ(vocab.decode(s.label), kOptionLetters[static_cast<std::size_t>(items[0].correct)]);
  EXPECT_TRUE(score_mcq(vocab.decode(s.label), items[0]));
  for (int id : s.query) EXPECT_LT(id, 256);
  EXPECT_EQ(img.height, 24u);
  EXPECT_NE(render_event(caps, 1), render_event(caps, 2));
}

TEST(Overlap, TokenF1) {
  EXPECT_DOUBLE_EQ(overlap_score("red square", "red square"), 1.0);
  EXPECT_DOUBLE_EQ(overlap_score("Red Square", "red square"), 1.0);
  EXPECT_DOUBLE_EQ(overlap_score("blue circle", "red square"), 0.0);
  EXPECT_NEAR(overlap_score("red square", "red square and blue"), 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(overlap_score("", "red"), 0.0);
  EXPECT_NEAR(overlap_score("red red", "red blue"), 0.5, 1e-12);
  EXPECT_THROW(overlap_score("red", ""), ContractError);
}

class RecordFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("lvlm_records_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(RecordFiles, PixelsRoundTripExactly) {
  std::vector<float> px{0.0f, 1.0f, 0.123456789f, -2.5e-20f, 1.0f / 3.0f};
  EXPECT_EQ(decode_pixels(encode_pixels(px), px.size()), px);
  EXPECT_THROW(decode_pixels(encode_pixels(px), px.size() + 1), InputError);
  EXPECT_THROW(decode_pixels("not base64!", 1), InputError);
}

TEST_F(RecordFiles, SamplesRoundTrip) {
  Vocabulary vocab(512);
  std::vector<Sample> samples;
  for (std::uint64_t s = 0; s < 5; ++s) samples.push_back(scene_vqa_sample(gen_scene(Rng(s)), vocab));
  auto caps = generate_hri_captions(Rng(1), 2);
  auto items = build_mcq(caps, Rng(2));
  samples.push_back(mcq_sample(items[0], render_event(caps, 0), vocab));
  write_samples(dir_ / "s.jsonl", samples);
  EXPECT_EQ(read_samples(dir_ / "s.jsonl"), samples);
}

TEST_F(RecordFiles, McqAndCaptionsRoundTrip) {
  auto caps = generate_hri_captions(Rng(1));
  auto items = build_mcq(caps, Rng(2));
  write_captions(dir_ / "c.jsonl", caps);
  write_mcq(dir_ / "m.jsonl", items);
  EXPECT_EQ(read_captions(dir_ / "c.jsonl"), caps);
  EXPECT_EQ(read_mcq(dir_ / "m.jsonl"), items);
}

TEST_F(RecordFiles, MalformedFilesAreInputErrors) {
  EXPECT_THROW(read_samples(dir_ / "missing.jsonl"), InputError);
  auto caps = generate_hri_captions(Rng(1), 1);
  write_captions(dir_ / "c.jsonl", caps);
  EXPECT_THROW(read_mcq(dir_ / "c.jsonl"), InputError);
  {
    std::ofstream out(dir_ / "short.jsonl");
    out << R"({"format":"lvlm-captions","version":1,"count":3})" << '\n';
  }
  EXPECT_THROW(read_captions(dir_ / "short.jsonl"), InputError);
  {
    std::ofstream out(dir_ / "bad.jsonl");
    out << "{not json\n";
  }
  EXPECT_THROW(read_captions(dir_ / "bad.jsonl"), InputError);
}

}  // namespace
}  // namespace lvlm
