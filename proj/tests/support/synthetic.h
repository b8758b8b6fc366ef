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

// Deterministic synthetic corpora and mock-experiment configs for tests.

#ifndef DECAYPROBE_TESTS_SUPPORT_SYNTHETIC_H_
#define DECAYPROBE_TESTS_SUPPORT_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "decayprobe/corpus.h"

namespace decayprobe::testing {

// Code tasks with prose prompts, python reference solutions and test suites.
Corpus make_code_corpus(std::string name, std::size_t n, std::uint64_t seed);

// Arithmetic word problems with numeric answers.
Corpus make_math_corpus(std::string name, std::size_t n, std::uint64_t seed);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

struct MockExperiment {
  std::filesystem::path dir;
  bool code = true;  // false: math corpora, no sandbox
  std::size_t tasks = 20;
  std::uint64_t corpus_seed = 11;
  std::uint64_t master_seed = 2024;
  double loose_threshold = 0.35;   // memorized corpus
  double strict_threshold = 0.75;  // fresh corpus, solved only when nearly intact
  int parallelism = 4;
  int n_resamples = 1000;
  std::vector<std::string> methods = {"truncation", "deletion", "typos"};
  bool with_baseline = false;
};

inline constexpr const char* kMemorizedLabel = "memorized";
inline constexpr const char* kFreshLabel = "fresh";

// Writes corpora and config.yaml under `dir`; returns the config path.
std::filesystem::path write_mock_experiment(const MockExperiment& spec);

// Path of the protocol stub used as the sandbox runner in tests.
std::filesystem::path stub_runner_path();
// argv that runs it; -S -I halve interpreter start-up.
std::vector<std::string> stub_runner_command();

}  // namespace decayprobe::testing

#endif  // DECAYPROBE_TESTS_SUPPORT_SYNTHETIC_H_
