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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include <gtest/gtest.h>

#include "lvlm/numerics/errors.hpp"
#include "lvlm/pipeline/ablation.hpp"
#include "lvlm/pipeline/benchmarks.hpp"
#include "lvlm/pipeline/corpus.hpp"
#include "lvlm/pipeline/metrics.hpp"
#include "lvlm/pipeline/training.hpp"

namespace lvlm {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("lvlm_training_" + std::to_string(::getpid()) + "_" + name);
}

Sample random_sample(const ModelConfig& cfg, Rng& rng) {
  Sample s;
  s.image = ImageGrid::blank(cfg.image_height, cfg.image_width);
  for (auto& p : s.image.pixels) p = static_cast<float>(rng.uniform());
  const auto span = static_cast<std::uint64_t>(cfg.vocab - tokens::kNumSpecial);
  for (int i = 0; i < 4; ++i) s.query.push_back(tokens::kNumSpecial + static_cast<int>(rng.below(span)));
  for (int i = 0; i < 2; ++i) s.label.push_back(tokens::kNumSpecial + static_cast<int>(rng.below(span)));
  return s;
}

std::vector<Sample> random_samples(const ModelConfig& cfg, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_sample(cfg, rng));
  return out;
}

PipelineConfig config_for(Variant v, ModelConfig model) {
  PipelineConfig c;
  c.variant = v;
  c.model = model;
  c.seed = 7;
  return c;
}

std::map<std::string, std::vector<float>> snapshot(const ParamStore<float>& params) {
  std::map<std::string, std::vector<float>> s;
  for (const auto& e : params.entries()) s[e.name] = {e.tensor.data().begin(), e.tensor.data().end()};
  return s;
}

// ---------------------------------------------------------------- corpus

TEST(Corpus, DeterministicWithPerTaskCounts) {
  const Vocabulary vocab(512);
  const CorpusSpec spec{5, 4, 3, 2, 1};
  const auto a = make_corpus(3, spec, vocab);
  EXPECT_EQ(a, make_corpus(3, spec, vocab));
  EXPECT_NE(a, make_corpus(4, spec, vocab));
  ASSERT_EQ(a.size(), spec.total());
  std::map<Task, int> counts;
  for (const auto& s : a) ++counts[s.task];
  EXPECT_EQ(counts[Task::Vqa], 6);  // relational + grounding
  EXPECT_EQ(counts[Task::Describe], 4);
  EXPECT_EQ(counts[Task::Navigate], 3);
  EXPECT_EQ(counts[Task::Mcq], 2);
}

TEST(Corpus, TasksInterleaveRoundRobin) {
  const Vocabulary vocab(512);
  const auto c = make_corpus(1, CorpusSpec{2, 2, 2, 2, 2}, vocab);
  const std::vector<Task> cycle = {Task::Vqa, Task::Describe, Task::Navigate, Task::Mcq, Task::Vqa};
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c[i].task, cycle[i % 5]) << i;
}

TEST(Corpus, GroundingQuestionsAskAboutTheOnlyShape) {
  const Vocabulary vocab(512);
  const auto c = make_corpus(9, CorpusSpec{0, 0, 0, 0, 40}, vocab);
  for (const auto& s : c) {
    const auto q = vocab.decode(s.query);
    EXPECT_EQ(q.rfind("what color is the ", 0), 0u) << q;
    for (const char* rel : {"left", "right", "above", "below"}) EXPECT_EQ(q.find(rel), std::string::npos) << q;
    ASSERT_EQ(s.label.size(), 1u);
    std::set<std::array<float, 3>> colors;
    for (std::size_t i = 0; i < s.image.pixels.size(); i += 3) {
      std::array<float, 3> px = {s.image.pixels[i], s.image.pixels[i + 1], s.image.pixels[i + 2]};
      if (px != std::array<float, 3>{0, 0, 0}) colors.insert(px);
    }
    ASSERT_EQ(colors.size(), 1u) << q;
    bool named = false;
    for (int k = 0; k < 6; ++k) {
      const auto color = static_cast<Color>(k);
      if (color_rgb(color) == *colors.begin()) named = vocab.decode(s.label) == color_name(color);
    }
    EXPECT_TRUE(named) << q << " -> " << vocab.decode(s.label);
  }
}

// ---------------------------------------------------------------- metrics

TEST(Metrics, RoundTripWritesNonFiniteAsNull) {
  const auto path = temp_path("metrics.jsonl");
  const std::vector<MetricRecord> records = {
      {"FullMethod", "mcq", "accuracy", 0.25, 40, 3},
      {"NoMLP", "navigate", "mean_final_distance", std::numeric_limits<double>::quiet_NaN(), 40, 3},
  };
  write_metrics(path, records);
  std::ifstream in(path);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_NE(second.find("\"value\":null"), std::string::npos) << second;
  const auto back = read_metrics(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], records[0]);
  EXPECT_EQ(back[1].variant, "NoMLP");
  EXPECT_TRUE(std::isnan(back[1].value));
  fs::remove(path);
}

TEST(Metrics, MalformedLinesAreInputErrors) {
  const auto path = temp_path("bad_metrics.jsonl");
  {
    std::ofstream out(path);
    out << "{\"variant\": \"FullMethod\", \"benchmark\": 3}\n";
  }
  EXPECT_THROW(read_metrics(path), InputError);
  EXPECT_THROW(read_metrics(temp_path("missing.jsonl")), InputError);
  fs::remove(path);
}

// ---------------------------------------------------------------- pretraining

TEST(Pretrain, HeldOutLossDropsAndOnlyTheBackboneMoves) {
  const Vocabulary vocab(512);
  VlmModel<float> model(ModelConfig::toy(), 11);
  const auto train = make_corpus(1, CorpusSpec{24, 12, 24, 12, 24}, vocab);
  const auto held_out = make_corpus(2, CorpusSpec{4, 2, 4, 2, 4}, vocab);
  const double before = mean_backbone_loss(model, held_out);
  const auto start = snapshot(model.params);

  PretrainOptions options;
  options.steps = 60;
  options.batch = 4;
  options.seed = 5;
  const auto log = pretrain_backbone(model, train, options);
  EXPECT_EQ(log.steps, 60u);
  EXPECT_EQ(log.losses.size(), 60u);
  EXPECT_LT(mean_backbone_loss(model, held_out), before);

  for (const auto& e : model.params.entries()) {
    const bool backbone = e.partition == Partition::Encoder || e.partition == Partition::Projector ||
                          e.partition == Partition::LanguageModel;
    const std::vector<float> now(e.tensor.data().begin(), e.tensor.data().end());
    if (!backbone) {
      EXPECT_EQ(now, start.at(e.name)) << e.name;
    }
    // Pretraining hands back a store ready for reasoner training.
    EXPECT_EQ(e.tensor.requires_grad(), !backbone) << e.name;
  }
}

TEST(Pretrain, SameSeedGivesBitwiseIdenticalWeights) {
  const Vocabulary vocab(512);
  const auto train = make_corpus(1, CorpusSpec{4, 2, 4, 2, 4}, vocab);
  PretrainOptions options;
  options.steps = 6;
  options.batch = 2;
  options.seed = 8;
  auto run = [&] {
    VlmModel<float> model(ModelConfig::toy(), 11);
    pretrain_backbone(model, train, options);
    return capture_checkpoint(model.params, checkpoint_hash(model.config()), 6);
  };
  EXPECT_EQ(run(), run());
}

TEST(Pretrain, RejectsEmptyDataAndZeroBatch) {
  VlmModel<float> model(ModelConfig::toy(), 11);
  PretrainOptions options;
  options.steps = 1;
  EXPECT_THROW(pretrain_backbone(model, {}, options), ContractError);
  options.batch = 0;
  const Vocabulary vocab(512);
  EXPECT_THROW(pretrain_backbone(model, make_corpus(1, CorpusSpec{1}, vocab), options), ContractError);
}

// ---------------------------------------------------------------- reasoner training

TEST(TrainReasoner, BaselinesHaveNothingToTrain) {
  const auto data = random_samples(ModelConfig::micro(), 2, 1);
  for (auto v : {Variant::DuplicateImageBaseline, Variant::PlainBaseline}) {
    auto p = build_pipeline(config_for(v, ModelConfig::micro()));
    const auto before = snapshot(p->model().params);
    TrainOptions options;
    options.steps = 3;
    const auto log = train_reasoner(*p, data, options);
    EXPECT_EQ(log.steps, 0u);
    EXPECT_TRUE(log.losses.empty());
    EXPECT_EQ(snapshot(p->model().params), before);
  }
}

TEST(TrainReasoner, CheckpointsEveryNStepsAndAtEpochEnds) {
  const auto data = random_samples(ModelConfig::micro(), 3, 2);
  auto p = build_pipeline(config_for(Variant::FullMethod, ModelConfig::micro()));
  std::vector<std::uint64_t> steps;
  TrainOptions options;
  options.steps = 7;
  options.seed = 1;
  options.checkpoint_every = 2;
  options.on_checkpoint = [&](const Checkpoint& c) {
    steps.push_back(c.step);
    EXPECT_TRUE(c.optimizer.has_value());
    EXPECT_EQ(c.optimizer->step, c.step);
  };
  const auto log = train_reasoner(*p, data, options);
  EXPECT_EQ(log.steps, 7u);
  // Every 2 steps, plus the epoch boundaries at 3 and 6 and the final step.
  EXPECT_EQ(steps, (std::vector<std::uint64_t>{2, 3, 4, 6, 7}));
}

TEST(TrainReasoner, DefaultIsOneEpochAndRunsAreReproducible) {
  const auto data = random_samples(ModelConfig::micro(), 5, 3);
  auto run = [&] {
    auto p = build_pipeline(config_for(Variant::FullMethod, ModelConfig::micro()));
    TrainOptions options;
    options.seed = 4;
    return train_reasoner(*p, data, options).losses;
  };
  const auto a = run();
  EXPECT_EQ(a.size(), data.size());
  EXPECT_EQ(a, run());
}

TEST(TrainReasoner, BackboneFromAnotherConfigIsRefused) {
  VlmModel<float> other(ModelConfig::toy(), 1);
  const auto ckpt = capture_checkpoint(other.params, checkpoint_hash(other.config()), 0);
  EXPECT_THROW(build_pipeline(config_for(Variant::FullMethod, ModelConfig::micro()), &ckpt),
               CheckpointError);
}

// ---------------------------------------------------------------- sweep

TEST(Sweep, SevenLogSpacedRatesWithExactEndpoints) {
  const auto lrs = sweep_learning_rates();
  ASSERT_EQ(lrs.size(), 7u);
  EXPECT_EQ(lrs.front(), 1e-2);
  EXPECT_EQ(lrs.back(), 1e-5);
  for (std::size_t i = 1; i < lrs.size(); ++i)
    EXPECT_NEAR(lrs[i] / lrs[i - 1], std::pow(10.0, -0.5), 1e-12);
}

TEST(Sweep, SelectsTheTwoBestArmsAndMergesThem) {
  const auto model = ModelConfig::micro();
  const auto train = random_samples(model, 4, 5);
  const auto validation = random_samples(model, 2, 6);
  auto base = config_for(Variant::FullMethod, model);
  const auto result = lr_sweep(base, nullptr, train, validation, SweepOptions{3, 0.5});
  ASSERT_EQ(result.arms.size(), 7u);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(result.arms[i].lr, sweep_learning_rates()[i]);
    EXPECT_FALSE(result.arms[i].failed);
    ASSERT_TRUE(result.arms[i].checkpoint.has_value());
    seeds.insert(result.arms[i].seed);
  }
  EXPECT_EQ(seeds.size(), 7u);

  std::vector<std::size_t> order(7);
  for (std::size_t i = 0; i < 7; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.arms[a].validation_loss < result.arms[b].validation_loss;
  });
  ASSERT_EQ(result.selected, (std::vector<std::size_t>{order[0], order[1]}));
  EXPECT_EQ(result.merged, merge_checkpoints(*result.arms[order[0]].checkpoint,
                                             *result.arms[order[1]].checkpoint, 0.5));
  // Same base config and seed, same sweep.
  EXPECT_EQ(lr_sweep(base, nullptr, train, validation, SweepOptions{3, 0.5}).merged, result.merged);
}

TEST(Sweep, DivergingArmsAreRecordedAndAllFailingIsAnError) {
  const auto model = ModelConfig::micro();
  VlmModel<float> broken(model, 7);
  for (auto& v : broken.lm.token_table.mutable_data()) v = std::numeric_limits<float>::quiet_NaN();
  const auto backbone = capture_checkpoint(broken.params, checkpoint_hash(model), 0);
  const auto data = random_samples(model, 2, 7);
  EXPECT_THROW(lr_sweep(config_for(Variant::FullMethod, model), &backbone, data, data, {2, 0.5}),
               std::runtime_error);
}

TEST(Sweep, BaselinesCannotBeSwept) {
  const auto model = ModelConfig::micro();
  const auto data = random_samples(model, 2, 8);
  EXPECT_THROW(lr_sweep(config_for(Variant::PlainBaseline, model), nullptr, data, data),
               ContractError);
}

// ---------------------------------------------------------------- benchmarks

TEST(Benchmarks, NamesAndMetricsRoundTrip) {
  for (auto b : kAllBenchmarks) EXPECT_EQ(parse_benchmark(benchmark_name(b)), b);
  EXPECT_FALSE(parse_benchmark("habitat").has_value());
  EXPECT_EQ(benchmark_metric(Benchmark::Navigate), "mean_final_distance");
  EXPECT_EQ(benchmark_metric(Benchmark::Mcq), "accuracy");
  EXPECT_EQ(benchmark_metric(Benchmark::Describe), "overlap_f1");
}

TEST(Benchmarks, DefaultSuiteHas376ValidItems) {
  const auto suite = make_benchmark_suite(21);
  EXPECT_EQ(suite.mcq.size(), 376u);
  for (const auto& item : suite.mcq) EXPECT_TRUE(item.valid());
  EXPECT_EQ(suite.episodes.size(), SuiteSpec{}.episodes);
  EXPECT_EQ(suite.describe.size(), SuiteSpec{}.describe);
  const auto again = make_benchmark_suite(21);
  EXPECT_EQ(again.mcq, suite.mcq);
  EXPECT_EQ(again.captions, suite.captions);
}

TEST(Benchmarks, DecodedActionLabelsParseBack) {
  const Vocabulary vocab(512);
  for (auto a : {Action::Stay, Action::Forward, Action::RotateLeft, Action::RotateRight})
    EXPECT_EQ(parse_action(vocab.decode(vocab.encode(action_json(a)))), a);
}

TEST(Benchmarks, UntrainedPipelineProducesBoundedDeterministicScores) {
  const Vocabulary vocab(512);
  const auto suite = make_benchmark_suite(4, SuiteSpec{2, 4, 4});
  auto p = build_pipeline(config_for(Variant::FullMethod, ModelConfig::toy()));

  const auto nav = run_benchmark(*p, Benchmark::Navigate, suite, vocab);
  ASSERT_EQ(nav.count, 2u);
  ASSERT_EQ(nav.episodes.size(), 2u);
  EXPECT_DOUBLE_EQ(nav.value, (nav.episodes[0].final_distance + nav.episodes[1].final_distance) / 2);
  EXPECT_GE(nav.value, 0.0);

  const auto mcq = run_benchmark(*p, Benchmark::Mcq, suite, vocab);
  EXPECT_EQ(mcq.count, 8u);
  EXPECT_GE(mcq.value, 0.0);
  EXPECT_LE(mcq.value, 1.0);

  const auto describe = run_benchmark(*p, Benchmark::Describe, suite, vocab);
  EXPECT_EQ(describe.count, 4u);
  EXPECT_GE(describe.value, 0.0);
  EXPECT_LE(describe.value, 1.0);

  EXPECT_EQ(run_benchmark(*p, Benchmark::Navigate, suite, vocab).value, nav.value);
  EXPECT_EQ(run_benchmark(*p, Benchmark::Describe, suite, vocab).value, describe.value);
}

TEST(Benchmarks, EmptySuiteIsRejected) {
  const Vocabulary vocab(512);
  auto p = build_pipeline(config_for(Variant::FullMethod, ModelConfig::toy()));
  for (auto b : kAllBenchmarks) EXPECT_THROW(run_benchmark(*p, b, BenchmarkSuite{}, vocab), ContractError);
}

// ---------------------------------------------------------------- ablation

struct AblationFixture : ::testing::Test {
  Vocabulary vocab{512};
  BenchmarkSuite suite = make_benchmark_suite(4, SuiteSpec{1, 2, 2});
  std::vector<Sample> train = make_corpus(1, CorpusSpec{1, 1, 1, 1}, vocab);
  Checkpoint backbone;
  AblationOptions options;

  void SetUp() override {
    options.base = config_for(Variant::FullMethod, ModelConfig::toy());
    options.train.steps = 2;
    options.train.seed = 3;
    options.train.checkpoint_every = 0;
    VlmModel<float> model(options.base.model, options.base.seed);
    backbone = capture_checkpoint(model.params, checkpoint_hash(options.base.model), 0);
  }
};

TEST_F(AblationFixture, SevenVariantsByThreeBenchmarksInOrder) {
  const auto report = run_ablation_matrix(options, backbone, train, suite, vocab);
  EXPECT_TRUE(report.failures.empty());
  ASSERT_EQ(report.records.size(), 21u);
  for (std::size_t v = 0; v < 7; ++v)
    for (std::size_t b = 0; b < 3; ++b) {
      const auto& r = report.records[v * 3 + b];
      EXPECT_EQ(r.variant, variant_name(kAllVariants[v]));
      EXPECT_EQ(r.benchmark, benchmark_name(kAllBenchmarks[b]));
      EXPECT_EQ(r.metric, benchmark_metric(kAllBenchmarks[b]));
      EXPECT_TRUE(std::isfinite(r.value));
      EXPECT_EQ(r.seed, options.base.seed);
      EXPECT_EQ(r.step, is_baseline(kAllVariants[v]) ? 0u : 2u);
    }
}

TEST_F(AblationFixture, HooksSeeTheVariantMechanics) {
  std::map<Variant, std::size_t> original_spans, reason_calls, identity_calls;
  options.instrument = [&](Pipeline<float>& p) {
    const Variant v = p.variant();
    p.hooks.on_second_pass_layout = [&, v](const SequenceLayout& layout) {
      for (const auto& s : layout.spans)
        if (s.source == SpanSource::Original) ++original_spans[v];
    };
    p.hooks.on_reason = [&, v](const Tensor& in, const Tensor& out) {
      ++reason_calls[v];
      if (in.shape() == out.shape() &&
          std::equal(in.data().begin(), in.data().end(), out.data().begin()))
        ++identity_calls[v];
    };
  };
  run_ablation_matrix(options, backbone, train, suite, vocab);
  EXPECT_EQ(original_spans[Variant::NoOriginalImage], 0u);
  EXPECT_GT(original_spans[Variant::FullMethod], 0u);
  EXPECT_GT(reason_calls[Variant::NoMLP], 0u);
  EXPECT_EQ(identity_calls[Variant::NoMLP], reason_calls[Variant::NoMLP]);
  EXPECT_EQ(identity_calls[Variant::FullMethod], 0u);
  EXPECT_EQ(reason_calls[Variant::PlainBaseline], 0u);
}

TEST_F(AblationFixture, OneFailingVariantOnlyBlanksItsOwnRow) {
  options.instrument = [](Pipeline<float>& p) {
    if (p.variant() == Variant::PromptFirst) throw std::runtime_error("instrumentation failed");
  };
  const auto report = run_ablation_matrix(options, backbone, train, suite, vocab);
  ASSERT_EQ(report.records.size(), 21u);
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].first, Variant::PromptFirst);
  for (const auto& r : report.records)
    EXPECT_EQ(std::isnan(r.value), r.variant == variant_name(Variant::PromptFirst)) << r.variant;
}

}  // namespace
}  // namespace lvlm
