// Copyright 2026 The decayprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DECAYPROBE_CONFIG_H_
#define DECAYPROBE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "decayprobe/gateway.h"
#include "decayprobe/sandbox.h"
#include "decayprobe/types.h"

namespace decayprobe {

struct CorpusSource {
  std::string label;
  std::filesystem::path path;
  std::optional<std::string> cutoff_note;
};

struct MemoryTierSpec {
  std::string corpus;  // label of a configured corpus, or a path
  double threshold = 0.35;
};

struct MockModelSpec {
  int ngram_size = 3;
  std::vector<MemoryTierSpec> tiers;
};

// Either a remote endpoint (ModelRef) or a memorizing mock.
struct ModelSpec {
  std::string name;
  std::optional<ModelRef> remote;
  std::optional<MockModelSpec> mock;
  int max_reprompts = 3;
};

struct BaselineSource {
  std::string dataset;
  std::string label;
  std::filesystem::path path;
};

struct ExperimentConfig {
  std::vector<CorpusSource> corpora;
  std::vector<ModelSpec> models;
  std::vector<Method> methods;
  std::uint64_t master_seed = 0;
  int parallelism = 1;
  SandboxLimits limits;
  std::vector<std::string> sandbox_command;  // empty: math-only runs
  std::optional<std::filesystem::path> blocklist;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> cache_dir;  // default output_dir/cache
  int n_resamples = 1000;
  double confidence = 0.95;
  std::vector<std::pair<std::string, std::string>> pairs;  // empty: all pairs
  std::vector<BaselineSource> baselines;

  std::filesystem::path effective_cache_dir() const;
};

// YAML config. Relative paths resolve against the config file's directory.
// Throws ConfigError naming the offending key.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::string_view yaml_text, const std::filesystem::path& base_dir);

// Empty when the config is usable. Does not touch the filesystem.
std::vector<std::string> validate_config(const ExperimentConfig& config);

// Canonical JSON of everything that determines outcomes. Parallelism,
// output and cache locations are excluded.
std::string manifest_json(const ExperimentConfig& config);

}  // namespace decayprobe

#endif  // DECAYPROBE_CONFIG_H_
