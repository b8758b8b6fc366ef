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

#ifndef DECAYPROBE_CORPUS_H_
#define DECAYPROBE_CORPUS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "decayprobe/types.h"

namespace decayprobe {

// One input/output pair. Both sides are JSON text: `input` is a JSON array
// holding the positional arguments, `expected` is the JSON return value.
// The evaluator owns deserialization.
struct TestCase {
  std::string input;
  std::string expected;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

struct Task {
  std::string id;
  TaskKind kind = TaskKind::kCode;
  std::string prompt;
  // Exactly one ground truth: `tests` for code tasks, `answer` for math.
  std::optional<std::vector<TestCase>> tests;
  std::optional<std::string> answer;
  std::optional<std::string> source;
  std::optional<std::string> published;  // YYYY-MM-DD
  // Adversarial tasks carry the suite of the famous task they imitate.
  std::optional<std::vector<TestCase>> trap_tests;
  std::optional<std::string> trap_label;
  // Reference solution text. Only consumed when the corpus seeds a
  // memorizing mock model.
  std::optional<std::string> solution;

  friend bool operator==(const Task&, const Task&) = default;
};

struct Corpus {
  std::string name;
  std::vector<Task> tasks;
  std::optional<std::string> cutoff_note;

  const Task* find(std::string_view id) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Points of a self-reported human baseline, ingested for chart overlays.
struct BaselineCurve {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (rate, value)

  // Linear interpolation between points; clamps outside the covered range.
  double value_at(double rate) const;
};

// Empty when every Task invariant holds. Each entry reads "<field>: <rule>"
// except the cross-field ground-truth rule.
std::vector<std::string> validate_task(const Task& task);

// Parses one corpus line. Throws MalformedRecord carrying `line_number`.
Task parse_task_line(std::string_view line, std::size_t line_number);
std::string serialize_task(const Task& task);

// Reads a line-delimited corpus file. Blank lines are skipped. The corpus
// name is the file stem unless `name` is given.
Corpus load_corpus(const std::filesystem::path& path,
                   std::optional<std::string> name = std::nullopt);
Corpus parse_corpus(std::string_view text, std::string name);
std::string serialize_corpus(const Corpus& corpus);

// CSV with header "rate,value". Label defaults to the file stem.
BaselineCurve load_baseline_curve(const std::filesystem::path& path,
                                  std::optional<std::string> label = std::nullopt);
BaselineCurve parse_baseline_curve(std::string_view text, std::string label);

}  // namespace decayprobe

#endif  // DECAYPROBE_CORPUS_H_
