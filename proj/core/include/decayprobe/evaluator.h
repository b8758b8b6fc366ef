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

#ifndef DECAYPROBE_EVALUATOR_H_
#define DECAYPROBE_EVALUATOR_H_

#include <chrono>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decayprobe/corpus.h"
#include "decayprobe/gateway.h"
#include "decayprobe/sandbox.h"
#include "decayprobe/types.h"

namespace decayprobe {

enum class Detail {
  kPassedAll,  // every test passed, or the math answer matched
  kFailedCase,
  kUnparseable,
  kBlocked,
  kTimeout,
  kRuntimeError,
  kWrongAnswer,
  kTrapMatched,
  kOther,
};

std::string_view to_string(Detail detail);
std::optional<Detail> parse_detail(std::string_view text);

struct EvalOutcome {
  std::string task_id;
  std::string model;
  Method method = Method::kTruncation;
  Level level;
  bool correct = false;
  Detail detail = Detail::kOther;
  std::optional<int> failed_case;  // 1-based, with Detail::kFailedCase
  std::string message;
  std::chrono::milliseconds duration{0};
};

// ---- code ----

// Body of the first fenced block. Throws Unparseable when there is none.
std::string extract_code(std::string_view response);
std::optional<std::string> try_extract_code(std::string_view response);

struct Blocklist {
  std::vector<std::string> entries;

  // The bundled list: process, shell, filesystem, network, dynamic
  // evaluation and introspection keywords.
  static const Blocklist& defaults();
  // One entry per line; '#' starts a comment line; blank lines ignored.
  static Blocklist parse(std::string_view text);
  static Blocklist load(const std::filesystem::path& path);
};

struct ScreenResult {
  bool allowed = true;
  std::string entry;  // the matching entry when blocked
};

// Plain substring matching: a blocked word inside a comment still blocks.
ScreenResult screen_code(std::string_view code, const Blocklist& blocklist);

struct TestReport {
  Detail detail = Detail::kOther;
  std::optional<int> failed_case;
  std::string message;

  bool passed() const { return detail == Detail::kPassedAll; }
};

// Runs `code` against `tests` in the sandbox. Passed-all requires every
// case to pass and its reported value to equal the expected one under
// canonical JSON equality; the first failing case decides the detail.
TestReport run_tests(std::string_view code, std::span<const TestCase> tests,
                     const SandboxRunner& runner);

// Canonical JSON value equality: numbers compare numerically, arrays
// element-wise, objects key-wise. Unparseable text compares as a string.
bool json_values_equal(std::string_view a, std::string_view b);

enum class AdversarialClass { kCorrect, kTrapMatched, kOther };
std::string_view to_string(AdversarialClass value);

AdversarialClass classify_adversarial(std::string_view code,
                                      std::span<const TestCase> correct_suite,
                                      std::span<const TestCase> trap_suite,
                                      const SandboxRunner& runner);

// ---- math ----

// Text after the last "ANSWER:" marker, trimmed. Throws Unparseable when
// no marker is present.
std::string extract_final_answer(std::string_view response);
std::optional<std::string> try_extract_final_answer(std::string_view response);

// Trim, strip enclosing '$', unwrap one outer \boxed{...}, drop a trailing
// period, collapse whitespace, lowercase; repeated until nothing changes.
std::string normalize_answer(std::string_view answer);
bool match_answer(std::string_view got, std::string_view expected);

// ---- scoring ----

// Reply contract and corrective reprompt for a task kind.
ResponseFormat response_format(TaskKind kind);

struct Verdict {
  bool correct = false;
  Detail detail = Detail::kOther;
  std::optional<int> failed_case;
  std::string message;
};

class Evaluator {
 public:
  // `runner` may be null when only math tasks will be scored.
  Evaluator(Blocklist blocklist, const SandboxRunner* runner);

  // Throws SandboxUnavailable for code tasks when no working runner exists.
  Verdict score(const Task& task, const ModelResponse& response) const;

  const Blocklist& blocklist() const { return blocklist_; }

 private:
  Verdict score_code(const Task& task, std::string_view raw) const;
  Verdict score_math(const Task& task, std::string_view raw) const;

  Blocklist blocklist_;
  const SandboxRunner* runner_;
};

}  // namespace decayprobe

#endif  // DECAYPROBE_EVALUATOR_H_
