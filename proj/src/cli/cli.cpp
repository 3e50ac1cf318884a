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

#include "lvlm/cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include "lvlm/cli/config.hpp"
#include "lvlm/datasets/io.hpp"
#include "lvlm/numerics/errors.hpp"
#include "lvlm/pipeline/ablation.hpp"
#include "lvlm/pipeline/gradcheck.hpp"
#include "lvlm/pipeline/metrics.hpp"
#include "lvlm/pipeline/training.hpp"

namespace lvlm::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kGradEps = 1e-5;
constexpr double kGradFloor = 1e-4;
constexpr double kGradLimit32 = 1e-3;
constexpr double kGradLimit64 = 1e-5;
constexpr std::size_t kTrainLossEvery = 50;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string variant;
  bool sweep = false;
  std::vector<std::string> benchmarks;
};

struct Context {
  RunConfig cfg;
  ModelConfig model;
  std::uint64_t seed = 0;
  fs::path out;
  std::ostream& log;
};

std::uint64_t derive(std::uint64_t seed, std::string_view name) { return Rng(seed).split(name).next_u64(); }

fs::path require_input(const std::optional<fs::path>& path, std::string_view key, std::string_view command) {
  if (!path)
    throw ConfigError("config key '" + std::string(key) + "' is required for " + std::string(command));
  if (!fs::exists(*path)) throw InputError(std::string(key) + " not found: " + path->string());
  return *path;
}

std::string step_name(std::uint64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%06llu.ckpt", static_cast<unsigned long long>(step));
  return buf;
}

PipelineConfig pipeline_config(const Context& ctx) {
  PipelineConfig pc;
  pc.variant = ctx.cfg.variant;
  pc.model = ctx.model;
  if (ctx.cfg.ordering) pc.ordering = *ctx.cfg.ordering;
  pc.optimizer.lr = ctx.cfg.lr;
  pc.steps = ctx.cfg.steps;
  pc.seed = ctx.seed;
  pc.max_new_tokens = ctx.cfg.max_new_tokens;
  return pc;
}

Checkpoint load_for(const Context& ctx, const fs::path& path) {
  return load_checkpoint(path, checkpoint_hash(ctx.model), ctx.cfg.force);
}

BenchmarkSuite suite_for(const Context& ctx) {
  auto suite = make_benchmark_suite(derive(ctx.seed, "benchmark"),
                                    SuiteSpec{ctx.cfg.episodes, 188, ctx.cfg.describe_samples});
  if (ctx.cfg.mcq_data) {
    suite.mcq = read_mcq(require_input(ctx.cfg.mcq_data, "mcq_data", "eval"));
    suite.captions = read_captions(require_input(ctx.cfg.captions_data, "captions_data", "eval"));
  }
  return suite;
}

std::string metric_line(const MetricRecord& r) {
  return r.variant + " " + r.benchmark + " " + r.metric + " = " + std::to_string(r.value);
}

// ---------------------------------------------------------------- subcommands

ExitCode cmd_datagen(Context& ctx) {
  const Vocabulary vocab(ctx.model.vocab);
  const auto train = make_corpus(derive(ctx.seed, "train"), ctx.cfg.corpus, vocab);
  const auto validation = make_corpus(derive(ctx.seed, "validation"), ctx.cfg.validation_corpus, vocab);
  const auto suite = make_benchmark_suite(derive(ctx.seed, "benchmark"), SuiteSpec{0, 188, 0});
  write_samples(ctx.out / "train.jsonl", train);
  write_samples(ctx.out / "validation.jsonl", validation);
  write_captions(ctx.out / "captions.jsonl", suite.captions);
  write_mcq(ctx.out / "mcq.jsonl", suite.mcq);
  ctx.log << "datagen: " << train.size() << " train, " << validation.size() << " validation samples, "
          << suite.mcq.size() << " mcq items\n";
  return ExitCode::Ok;
}

ExitCode cmd_pretrain(Context& ctx) {
  const auto train = read_samples(require_input(ctx.cfg.train_data, "train_data", "pretrain"));
  std::optional<std::vector<Sample>> validation;
  if (ctx.cfg.validation_data) validation = read_samples(require_input(ctx.cfg.validation_data, "validation_data", "pretrain"));

  VlmModel<float> model(ctx.model, ctx.seed);
  std::vector<MetricRecord> metrics;
  auto record = [&](std::string benchmark, double value, std::uint64_t step) {
    metrics.push_back({"backbone", std::move(benchmark), "loss", value, step, ctx.seed});
  };
  if (validation) record("validation", mean_backbone_loss(model, *validation), 0);

  PretrainOptions options;
  options.steps = ctx.cfg.pretrain_steps;
  options.batch = ctx.cfg.pretrain_batch;
  options.seed = derive(ctx.seed, "pretrain");
  options.optimizer.lr = ctx.cfg.pretrain_lr;
  options.blank_probability = ctx.cfg.blank_probability;
  const auto log = pretrain_backbone(model, train, options);
  for (std::size_t s = kTrainLossEvery; s <= log.losses.size(); s += kTrainLossEvery) {
    double sum = 0.0;
    for (std::size_t i = s - kTrainLossEvery; i < s; ++i) sum += log.losses[i];
    record("train", sum / kTrainLossEvery, s);
  }
  if (validation) record("validation", mean_backbone_loss(model, *validation), log.steps);

  save_checkpoint(capture_checkpoint(model.params, checkpoint_hash(ctx.model), log.steps),
                  ctx.out / "backbone.ckpt");
  write_metrics(ctx.out / "metrics.jsonl", metrics);
  ctx.log << "pretrain: " << log.steps << " steps, recent train loss " << log.recent_loss() << "\n";
  if (validation)
    ctx.log << "pretrain: validation loss " << metrics.front().value << " -> " << metrics.back().value << "\n";
  return ExitCode::Ok;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

ExitCode cmd_train(Context& ctx) {
  const auto backbone = load_for(ctx, require_input(ctx.cfg.backbone, "backbone", "train"));
  const auto train = read_samples(require_input(ctx.cfg.train_data, "train_data", "train"));
  std::optional<std::vector<Sample>> validation;
  if (ctx.cfg.validation_data || ctx.cfg.sweep)
    validation = read_samples(require_input(ctx.cfg.validation_data, "validation_data", "train"));
  const auto pc = pipeline_config(ctx);
  const std::string variant(variant_name(pc.variant));
  std::vector<MetricRecord> metrics;

  if (ctx.cfg.sweep) {
    const auto result = lr_sweep(pc, &backbone, train, *validation, SweepOptions{ctx.cfg.steps, 0.5});
    fs::create_directories(ctx.out / "arms");
    std::ofstream arms(ctx.out / "sweep.jsonl", std::ios::binary);
    for (std::size_t i = 0; i < result.arms.size(); ++i) {
      const auto& arm = result.arms[i];
      const bool selected = std::find(result.selected.begin(), result.selected.end(), i) != result.selected.end();
      nlohmann::json j = {{"arm", i},
                          {"lr", arm.lr},
                          {"seed", arm.seed},
                          {"failed", arm.failed},
                          {"error", arm.error},
                          {"train_loss", finite_or_null(arm.train_loss)},
                          {"validation_loss", finite_or_null(arm.validation_loss)},
                          {"selected", selected}};
      arms << j.dump() << '\n';
      const std::uint64_t step = arm.checkpoint ? arm.checkpoint->step : 0;
      metrics.push_back({variant, "validation", "loss",
                         arm.failed ? std::nan("") : arm.validation_loss, step, arm.seed});
      if (arm.checkpoint) {
        char name[32];
        std::snprintf(name, sizeof name, "arm_%zu.ckpt", i);
        save_checkpoint(*arm.checkpoint, ctx.out / "arms" / name);
      }
      ctx.log << "train: arm " << i << " lr " << arm.lr
              << (arm.failed ? " failed: " + arm.error : " validation loss " + std::to_string(arm.validation_loss))
              << "\n";
    }
    save_checkpoint(result.merged, ctx.out / "merged.ckpt");
    write_metrics(ctx.out / "metrics.jsonl", metrics);
    return ExitCode::Ok;
  }

  auto pipeline = build_pipeline(pc, &backbone);
  TrainOptions options;
  options.steps = ctx.cfg.steps;
  options.seed = derive(ctx.seed, "train");
  options.checkpoint_every = ctx.cfg.checkpoint_every;
  fs::create_directories(ctx.out / "checkpoints");
  options.on_checkpoint = [&](const Checkpoint& c) {
    save_checkpoint(c, ctx.out / "checkpoints" / step_name(c.step));
  };
  const auto log = train_reasoner(*pipeline, train, options);
  for (std::size_t i = 0; i < log.losses.size(); ++i)
    metrics.push_back({variant, "train", "loss", log.losses[i], i + 1, ctx.seed});
  if (validation)
    metrics.push_back({variant, "validation", "loss", mean_loss(*pipeline, *validation), log.steps, ctx.seed});
  save_checkpoint(capture_checkpoint(pipeline->model().params, checkpoint_hash(ctx.model), log.steps),
                  ctx.out / "final.ckpt");
  write_metrics(ctx.out / "metrics.jsonl", metrics);
  ctx.log << "train: " << log.steps << " steps";
  if (!log.losses.empty()) ctx.log << ", recent loss " << log.recent_loss();
  ctx.log << "\n";
  return ExitCode::Ok;
}

ExitCode cmd_eval(Context& ctx) {
  const auto ckpt = load_for(ctx, require_input(ctx.cfg.checkpoint, "checkpoint", "eval"));
  auto pipeline = build_pipeline(pipeline_config(ctx));
  restore_checkpoint(pipeline->model().params, ckpt);
  const Vocabulary vocab(ctx.model.vocab);
  const auto suite = suite_for(ctx);
  const std::string variant(variant_name(ctx.cfg.variant));

  std::vector<MetricRecord> metrics;
  bool failed = false;
  for (const auto b : ctx.cfg.benchmarks) {
    MetricRecord r{variant, std::string(benchmark_name(b)), std::string(benchmark_metric(b)),
                   std::nan(""), ckpt.step, ctx.seed};
    try {
      const auto outcome = run_benchmark(*pipeline, b, suite, vocab);
      r.value = outcome.value;
      if (b == Benchmark::Navigate) {
        fs::create_directories(ctx.out / "traces");
        for (std::size_t i = 0; i < outcome.episodes.size(); ++i) {
          char name[32];
          std::snprintf(name, sizeof name, "episode_%03zu.jsonl", i);
          std::ofstream(ctx.out / "traces" / name, std::ios::binary) << trace_jsonl(outcome.episodes[i].trace);
        }
      }
      ctx.log << "eval: " << metric_line(r) << " over " << outcome.count << " items\n";
    } catch (const std::exception& e) {
      failed = true;
      ctx.log << "eval: " << r.benchmark << " failed: " << e.what() << "\n";
    }
    metrics.push_back(r);
  }
  write_metrics(ctx.out / "metrics.jsonl", metrics);
  return failed ? ExitCode::Runtime : ExitCode::Ok;
}

ExitCode cmd_ablate(Context& ctx) {
  const auto backbone = load_for(ctx, require_input(ctx.cfg.backbone, "backbone", "ablate"));
  const auto train = read_samples(require_input(ctx.cfg.train_data, "train_data", "ablate"));
  const Vocabulary vocab(ctx.model.vocab);
  AblationOptions options;
  options.base = pipeline_config(ctx);
  options.train.steps = ctx.cfg.steps;
  options.train.seed = derive(ctx.seed, "train");
  options.train.checkpoint_every = 0;
  const auto report = run_ablation_matrix(options, backbone, train, suite_for(ctx), vocab);
  write_metrics(ctx.out / "ablation.jsonl", report.records);
  for (const auto& r : report.records) ctx.log << "ablate: " << metric_line(r) << "\n";
  for (const auto& [v, what] : report.failures) ctx.log << "ablate: " << variant_name(v) << " failed: " << what << "\n";
  return report.failures.empty() ? ExitCode::Ok : ExitCode::Runtime;
}

ExitCode cmd_merge(Context& ctx) {
  const auto a = load_checkpoint(require_input(ctx.cfg.merge_a, "merge_a", "merge"));
  const auto b = load_checkpoint(require_input(ctx.cfg.merge_b, "merge_b", "merge"));
  save_checkpoint(merge_checkpoints(a, b, ctx.cfg.merge_weight), ctx.out / "merged.ckpt");
  ctx.log << "merge: weight " << ctx.cfg.merge_weight << ", " << a.tensors.size() << " tensors\n";
  return ExitCode::Ok;
}

ExitCode cmd_gradcheck(Context& ctx) {
  const auto f32 = full_graph_grad_check<float>(ctx.seed, kGradEps, kGradFloor);
  const auto f64 = full_graph_grad_check<double>(ctx.seed, kGradEps, kGradFloor);
  const std::vector<MetricRecord> metrics = {
      {"FullMethod", "gradcheck", "max_rel_error_f32", f32.max_rel_error, 0, ctx.seed},
      {"FullMethod", "gradcheck", "max_rel_error_f64", f64.max_rel_error, 0, ctx.seed},
  };
  write_metrics(ctx.out / "gradcheck.jsonl", metrics);
  const bool ok = f32.max_rel_error < kGradLimit32 && f64.max_rel_error < kGradLimit64;
  ctx.log << "gradcheck: " << f32.coordinates << " coordinates, max rel error " << f32.max_rel_error
          << " (32-bit, limit " << kGradLimit32 << "), " << f64.max_rel_error << " (64-bit, limit "
          << kGradLimit64 << ") " << (ok ? "ok" : "FAILED") << "\n";
  return ok ? ExitCode::Ok : ExitCode::CheckFailed;
}

using Command = ExitCode (*)(Context&);

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-pass visual feedback pipeline at desk scale", "lvlm"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, Command>> commands = {
      {"pretrain", cmd_pretrain}, {"train", cmd_train},         {"eval", cmd_eval},
      {"ablate", cmd_ablate},     {"merge", cmd_merge},         {"gradcheck", cmd_gradcheck},
      {"datagen", cmd_datagen},
  };
  const std::map<std::string, std::string> help = {
      {"pretrain", "Train encoder, projector and language model on a sample file"},
      {"train", "Train reasoner, unmerger and adapters on a frozen backbone"},
      {"eval", "Run benchmarks on a trained checkpoint"},
      {"ablate", "Train and evaluate all seven variants"},
      {"merge", "Interpolate two checkpoints"},
      {"gradcheck", "Finite-difference check of the two-pass gradient"},
      {"datagen", "Write training, validation and benchmark files"},
  };
  for (const auto& [name, _] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", flags.config, "Config file (key = value lines)");
    sub->add_option("--seed", flags.seed, "Seed; overrides the config");
    sub->add_option("--out", flags.out, "Output directory")->required();
    sub->add_option("--variant", flags.variant, "Pipeline variant");
    sub->add_flag("--sweep", flags.sweep, "Sweep seven learning rates and merge the best two");
    sub->add_option("--benchmark", flags.benchmarks, "Benchmark to run (repeatable)");
  }

  std::vector<const char*> argv = {"lvlm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return static_cast<int>(ExitCode::Ok);
  } catch (const CLI::ParseError& e) {
    err << "lvlm: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  }

  const auto* chosen = app.get_subcommands().front();
  try {
    RunConfig cfg = flags.config.empty() ? RunConfig{} : load_config(flags.config);
    if (flags.seed) cfg.seed = flags.seed;
    if (!cfg.seed) throw ConfigError("a seed is required (--seed or config key 'seed')");
    if (!flags.variant.empty()) {
      const auto v = parse_variant(flags.variant);
      if (!v) throw ConfigError("unknown variant '" + flags.variant + "'");
      cfg.variant = *v;
    }
    if (flags.sweep) cfg.sweep = true;
    if (!flags.benchmarks.empty()) {
      cfg.benchmarks.clear();
      for (const auto& name : flags.benchmarks) {
        const auto b = parse_benchmark(name);
        if (!b) throw ConfigError("unknown benchmark '" + name + "'");
        cfg.benchmarks.push_back(*b);
      }
    }
    const auto model = cfg.model_config();
    fs::create_directories(flags.out);
    Context ctx{cfg, model, *cfg.seed, fs::path(flags.out), out};
    for (const auto& [name, fn] : commands)
      if (name == chosen->get_name()) return static_cast<int>(fn(ctx));
    return static_cast<int>(ExitCode::Usage);
  } catch (const ConfigError& e) {
    err << "lvlm " << chosen->get_name() << ": config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  } catch (const InputError& e) {
    err << "lvlm " << chosen->get_name() << ": input error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  } catch (const CheckpointError& e) {
    err << "lvlm " << chosen->get_name() << ": checkpoint error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  } catch (const NonFiniteLossError& e) {
    err << "lvlm " << chosen->get_name() << ": diverged: " << e.what() << " (gate mean " << e.gate().mean
        << ", min " << e.gate().min << ", max " << e.gate().max << ", n " << e.gate().count << ")\n";
    return static_cast<int>(ExitCode::Runtime);
  } catch (const std::exception& e) {
    err << "lvlm " << chosen->get_name() << ": " << e.what() << "\n";
    return static_cast<int>(ExitCode::Runtime);
  }
}

}  // namespace lvlm::cli
