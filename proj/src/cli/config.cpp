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

#include "lvlm/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lvlm/numerics/errors.hpp"

namespace lvlm::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError("config key '" + std::string(key) + "': expected " + std::string(want) +
                    ", got '" + std::string(value) + "'");
}

template <typename N>
N parse_number(std::string_view key, std::string_view v, std::string_view want) {
  N out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, want);
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view v) {
  return parse_number<std::size_t>(key, v, "a non-negative integer");
}

double parse_real(std::string_view key, std::string_view v) {
  const double d = parse_number<double>(key, v, "a number");
  if (!std::isfinite(d)) bad_value(key, v, "a finite number");
  return d;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v = v.substr(comma + 1);
  }
  return out;
}

CorpusSpec parse_corpus(std::string_view key, std::string_view v) {
  const auto parts = split_list(v);
  if (parts.size() != 5) bad_value(key, v, "five counts: vqa, describe, navigate, mcq, grounding");
  return {parse_count(key, parts[0]), parse_count(key, parts[1]), parse_count(key, parts[2]),
          parse_count(key, parts[3]), parse_count(key, parts[4])};
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::vector<std::pair<std::string_view, Setter>>& setters() {
  static const std::vector<std::pair<std::string_view, Setter>> table = {
      {"model", [](RunConfig& c, auto, auto v) { c.model = std::string(v); }},
      {"d_llm", [](RunConfig& c, auto k, auto v) { c.d_llm = parse_count(k, v); }},
      {"d_embed", [](RunConfig& c, auto k, auto v) { c.d_embed = parse_count(k, v); }},
      {"lm_blocks", [](RunConfig& c, auto k, auto v) { c.lm_blocks = parse_count(k, v); }},
      {"enc_blocks", [](RunConfig& c, auto k, auto v) { c.enc_blocks = parse_count(k, v); }},
      {"lm_heads", [](RunConfig& c, auto k, auto v) { c.lm_heads = parse_count(k, v); }},
      {"enc_heads", [](RunConfig& c, auto k, auto v) { c.enc_heads = parse_count(k, v); }},
      {"vocab", [](RunConfig& c, auto k, auto v) { c.vocab = parse_count(k, v); }},
      {"lora", [](RunConfig& c, auto k, auto v) { c.lora = parse_bool(k, v); }},
      {"lora_rank", [](RunConfig& c, auto k, auto v) { c.lora_rank = parse_count(k, v); }},
      {"lora_alpha", [](RunConfig& c, auto k, auto v) { c.lora_alpha = parse_real(k, v); }},
      {"dropout", [](RunConfig& c, auto k, auto v) { c.dropout = parse_real(k, v); }},
      {"variant",
       [](RunConfig& c, auto k, auto v) {
         const auto parsed = parse_variant(v);
         if (!parsed) bad_value(k, v, "a variant name");
         c.variant = *parsed;
       }},
      {"ordering",
       [](RunConfig& c, auto k, auto v) {
         if (v == "image_first") c.ordering = Ordering::ImageFirst;
         else if (v == "prompt_first") c.ordering = Ordering::PromptFirst;
         else bad_value(k, v, "image_first or prompt_first");
       }},
      {"lr", [](RunConfig& c, auto k, auto v) { c.lr = parse_real(k, v); }},
      {"sweep", [](RunConfig& c, auto k, auto v) { c.sweep = parse_bool(k, v); }},
      {"steps", [](RunConfig& c, auto k, auto v) { c.steps = parse_count(k, v); }},
      {"checkpoint_every", [](RunConfig& c, auto k, auto v) { c.checkpoint_every = parse_count(k, v); }},
      {"max_new_tokens", [](RunConfig& c, auto k, auto v) { c.max_new_tokens = parse_count(k, v); }},
      {"pretrain_steps", [](RunConfig& c, auto k, auto v) { c.pretrain_steps = parse_count(k, v); }},
      {"pretrain_batch", [](RunConfig& c, auto k, auto v) { c.pretrain_batch = parse_count(k, v); }},
      {"pretrain_lr", [](RunConfig& c, auto k, auto v) { c.pretrain_lr = parse_real(k, v); }},
      {"blank_probability", [](RunConfig& c, auto k, auto v) { c.blank_probability = parse_real(k, v); }},
      {"train_data", [](RunConfig& c, auto, auto v) { c.train_data = std::string(v); }},
      {"validation_data", [](RunConfig& c, auto, auto v) { c.validation_data = std::string(v); }},
      {"backbone", [](RunConfig& c, auto, auto v) { c.backbone = std::string(v); }},
      {"checkpoint", [](RunConfig& c, auto, auto v) { c.checkpoint = std::string(v); }},
      {"captions_data", [](RunConfig& c, auto, auto v) { c.captions_data = std::string(v); }},
      {"mcq_data", [](RunConfig& c, auto, auto v) { c.mcq_data = std::string(v); }},
      {"merge_a", [](RunConfig& c, auto, auto v) { c.merge_a = std::string(v); }},
      {"merge_b", [](RunConfig& c, auto, auto v) { c.merge_b = std::string(v); }},
      {"merge_weight", [](RunConfig& c, auto k, auto v) { c.merge_weight = parse_real(k, v); }},
      {"force", [](RunConfig& c, auto k, auto v) { c.force = parse_bool(k, v); }},
      {"benchmarks",
       [](RunConfig& c, auto k, auto v) {
         c.benchmarks.clear();
         for (auto name : split_list(v)) {
           const auto b = parse_benchmark(name);
           if (!b) bad_value(k, name, "navigate, mcq or describe");
           c.benchmarks.push_back(*b);
         }
       }},
      {"episodes", [](RunConfig& c, auto k, auto v) { c.episodes = parse_count(k, v); }},
      {"describe_samples", [](RunConfig& c, auto k, auto v) { c.describe_samples = parse_count(k, v); }},
      {"corpus", [](RunConfig& c, auto k, auto v) { c.corpus = parse_corpus(k, v); }},
      {"validation_corpus", [](RunConfig& c, auto k, auto v) { c.validation_corpus = parse_corpus(k, v); }},
      {"seed",
       [](RunConfig& c, auto k, auto v) {
         c.seed = parse_number<std::uint64_t>(k, v, "a non-negative integer");
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

ModelConfig RunConfig::model_config() const {
  ModelConfig m;
  if (model == "toy") m = ModelConfig::toy();
  else if (model == "micro") m = ModelConfig::micro();
  else throw ConfigError("config key 'model': expected toy or micro, got '" + model + "'");
  if (d_llm) {
    m.d_llm = *d_llm;
    m.lm_kv_dim = *d_llm;
    m.lm_ffn_hidden = 4 * *d_llm;
  }
  if (d_embed) {
    m.d_embed = *d_embed;
    m.enc_ffn_hidden = 4 * *d_embed;
  }
  if (lm_blocks) m.lm_blocks = *lm_blocks;
  if (enc_blocks) m.enc_blocks = *enc_blocks;
  if (lm_heads) m.lm_heads = *lm_heads;
  if (enc_heads) m.enc_heads = *enc_heads;
  if (vocab) m.vocab = *vocab;
  if (lora) m.lora = *lora;
  if (lora_rank) m.lora_rank = *lora_rank;
  if (lora_alpha) m.lora_alpha = *lora_alpha;
  if (dropout) m.reasoner_dropout = *dropout;
  m.validate_instantiable();
  return m;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(where + ": key '" + std::string(key) + "' has no value");
    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
    if (it == table.end()) throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second)
      throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
    it->second(cfg, key, value);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace lvlm::cli
