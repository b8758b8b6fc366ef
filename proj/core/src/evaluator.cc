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

#include "decayprobe/evaluator.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "decayprobe/errors.h"
#include "nlohmann/json.hpp"

namespace decayprobe {

// Generated from core/data/blocklist.txt.
extern const char* const kDefaultBlocklist;

namespace {

constexpr std::string_view kFence = "```";
constexpr std::string_view kAnswerMarker = "ANSWER:";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// "\boxed{...}" whose opening brace closes at the very end.
std::optional<std::string_view> unwrap_boxed(std::string_view s) {
  constexpr std::string_view kBoxed = "\\boxed{";
  if (!s.starts_with(kBoxed) || !s.ends_with('}')) return std::nullopt;
  int depth = 0;
  for (std::size_t i = kBoxed.size() - 1; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) {
      if (i != s.size() - 1) return std::nullopt;
      return s.substr(kBoxed.size(), s.size() - kBoxed.size() - 1);
    }
  }
  return std::nullopt;
}

std::string normalize_once(std::string_view input) {
  std::string_view s = trim(input);
  while (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
    s = trim(s.substr(1, s.size() - 2));
  }
  if (auto inner = unwrap_boxed(s)) s = trim(*inner);
  if (!s.empty() && s.back() == '.') s.remove_suffix(1);

  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view to_string(Detail detail) {
  switch (detail) {
    case Detail::kPassedAll: return "passed_all";
    case Detail::kFailedCase: return "failed_case";
    case Detail::kUnparseable: return "unparseable";
    case Detail::kBlocked: return "blocked";
    case Detail::kTimeout: return "timeout";
    case Detail::kRuntimeError: return "runtime_error";
    case Detail::kWrongAnswer: return "wrong_answer";
    case Detail::kTrapMatched: return "trap_matched";
    case Detail::kOther: return "other";
  }
  return "other";
}

std::optional<Detail> parse_detail(std::string_view text) {
  for (Detail d : {Detail::kPassedAll, Detail::kFailedCase, Detail::kUnparseable, Detail::kBlocked,
                   Detail::kTimeout, Detail::kRuntimeError, Detail::kWrongAnswer,
                   Detail::kTrapMatched, Detail::kOther}) {
    if (to_string(d) == text) return d;
  }
  return std::nullopt;
}

std::string_view to_string(AdversarialClass value) {
  switch (value) {
    case AdversarialClass::kCorrect: return "correct";
    case AdversarialClass::kTrapMatched: return "trap_matched";
    case AdversarialClass::kOther: return "other";
  }
  return "other";
}

// ---- code ----

std::optional<std::string> try_extract_code(std::string_view response) {
  const std::size_t open = response.find(kFence);
  if (open == std::string_view::npos) return std::nullopt;
  std::size_t body_begin = open + kFence.size();
  const std::size_t eol = response.find('\n', body_begin);
  const std::size_t close_same_line = response.find(kFence, body_begin);
  if (close_same_line != std::string_view::npos &&
      (eol == std::string_view::npos || close_same_line < eol)) {
    // ```code``` on one line: no language tag.
    return std::string(trim(response.substr(body_begin, close_same_line - body_begin)));
  }
  if (eol == std::string_view::npos) return std::nullopt;
  body_begin = eol + 1;
  const std::size_t close = response.find(kFence, body_begin);
  if (close == std::string_view::npos) return std::nullopt;
  std::string_view body = response.substr(body_begin, close - body_begin);
  while (!body.empty() && is_space(body.back())) body.remove_suffix(1);
  return std::string(body);
}

std::string extract_code(std::string_view response) {
  auto code = try_extract_code(response);
  if (!code) throw Unparseable("response contains no fenced code block");
  return *code;
}

const Blocklist& Blocklist::defaults() {
  static const Blocklist list = parse(kDefaultBlocklist);
  return list;
}

Blocklist Blocklist::parse(std::string_view text) {
  Blocklist list;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    list.entries.emplace_back(trim(line));
  }
  return list;
}

Blocklist Blocklist::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open blocklist " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ScreenResult screen_code(std::string_view code, const Blocklist& blocklist) {
  for (const std::string& entry : blocklist.entries) {
    if (!entry.empty() && code.find(entry) != std::string_view::npos) return {false, entry};
  }
  return {};
}

bool json_values_equal(std::string_view a, std::string_view b) {
  const auto ja = nlohmann::json::parse(a, nullptr, false);
  const auto jb = nlohmann::json::parse(b, nullptr, false);
  if (ja.is_discarded() || jb.is_discarded()) return trim(a) == trim(b);
  return ja == jb;
}

TestReport run_tests(std::string_view code, std::span<const TestCase> tests,
                     const SandboxRunner& runner) {
  if (tests.empty()) throw std::invalid_argument("run_tests needs at least one test case");
  RunRequest request;
  request.code = std::string(code);
  request.cases.assign(tests.begin(), tests.end());
  request.per_case_timeout = runner.limits().per_case_timeout;

  const RunResult result = runner.run(request);
  if (result.killed_on_deadline) {
    return {Detail::kTimeout, std::nullopt, "killed after exceeding the wall-clock budget"};
  }
  if (result.crashed) return {Detail::kRuntimeError, std::nullopt, result.diagnostics};

  for (std::size_t i = 0; i < result.per_case.size() && i < tests.size(); ++i) {
    const CaseResult& c = result.per_case[i];
    const int index = static_cast<int>(i) + 1;
    const std::string where = "case " + std::to_string(index) + ": ";
    switch (c.status) {
      case CaseStatus::kPass:
        if (!c.actual || !json_values_equal(*c.actual, tests[i].expected)) {
          return {Detail::kFailedCase, index,
                  where + "runner reported pass but value " + c.actual.value_or("null") +
                      " != expected " + tests[i].expected};
        }
        break;
      case CaseStatus::kFail:
        return {Detail::kFailedCase, index,
                where + "expected " + tests[i].expected + ", got " + c.actual.value_or("null")};
      case CaseStatus::kError:
        return {Detail::kRuntimeError, std::nullopt, where + c.message};
      case CaseStatus::kTimeout:
        return {Detail::kTimeout, std::nullopt, where + "exceeded per-case timeout"};
    }
  }
  if (result.per_case.size() < tests.size()) {
    return {Detail::kOther, std::nullopt,
            "runner returned " + std::to_string(result.per_case.size()) + " of " +
                std::to_string(tests.size()) + " case results"};
  }
  return {Detail::kPassedAll, std::nullopt, {}};
}

AdversarialClass classify_adversarial(std::string_view code,
                                      std::span<const TestCase> correct_suite,
                                      std::span<const TestCase> trap_suite,
                                      const SandboxRunner& runner) {
  if (run_tests(code, correct_suite, runner).passed()) return AdversarialClass::kCorrect;
  if (run_tests(code, trap_suite, runner).passed()) return AdversarialClass::kTrapMatched;
  return AdversarialClass::kOther;
}

// ---- math ----

std::optional<std::string> try_extract_final_answer(std::string_view response) {
  const std::size_t marker = response.rfind(kAnswerMarker);
  if (marker == std::string_view::npos) return std::nullopt;
  std::string_view rest = response.substr(marker + kAnswerMarker.size());
  rest = rest.substr(0, rest.find('\n'));
  rest = trim(rest);
  if (rest.empty()) return std::nullopt;
  return std::string(rest);
}

std::string extract_final_answer(std::string_view response) {
  auto answer = try_extract_final_answer(response);
  if (!answer) throw Unparseable("response has no \"ANSWER:\" line");
  return *answer;
}

std::string normalize_answer(std::string_view answer) {
  std::string current = normalize_once(answer);
  for (;;) {
    std::string next = normalize_once(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

bool match_answer(std::string_view got, std::string_view expected) {
  return normalize_answer(got) == normalize_answer(expected);
}

// ---- scoring ----

ResponseFormat response_format(TaskKind kind) {
  if (kind == TaskKind::kCode) {
    return {[](std::string_view r) { return try_extract_code(r).has_value(); },
            "Reply with the complete solution in a single fenced Python code block."};
  }
  return {[](std::string_view r) { return try_extract_final_answer(r).has_value(); },
          "Finish your reply with a line of the form \"ANSWER: <final answer>\"."};
}

Evaluator::Evaluator(Blocklist blocklist, const SandboxRunner* runner)
    : blocklist_(std::move(blocklist)), runner_(runner) {}

Verdict Evaluator::score(const Task& task, const ModelResponse& response) const {
  if (response.parse_status == ParseStatus::kUnparseable) {
    return {false, Detail::kUnparseable, std::nullopt,
            "no parseable reply after " + std::to_string(response.attempts) + " attempts"};
  }
  return task.kind == TaskKind::kCode ? score_code(task, response.raw)
                                      : score_math(task, response.raw);
}

Verdict Evaluator::score_code(const Task& task, std::string_view raw) const {
  const auto code = try_extract_code(raw);
  if (!code) return {false, Detail::kUnparseable, std::nullopt, "no fenced code block"};
  const ScreenResult screen = screen_code(*code, blocklist_);
  if (!screen.allowed) {
    return {false, Detail::kBlocked, std::nullopt, "blocked keyword: " + screen.entry};
  }
  if (!runner_) throw SandboxUnavailable("code task " + task.id + " needs a sandbox runner");
  if (!task.tests || task.tests->empty()) {
    throw std::invalid_argument("code task " + task.id + " has no tests");
  }
  const TestReport report = run_tests(*code, *task.tests, *runner_);
  if (report.passed()) return {true, Detail::kPassedAll, std::nullopt, {}};
  if (task.trap_tests && !task.trap_tests->empty() &&
      run_tests(*code, *task.trap_tests, *runner_).passed()) {
    return {false, Detail::kTrapMatched, std::nullopt,
            "solves " + task.trap_label.value_or("the imitated task") + " instead"};
  }
  return {false, report.detail, report.failed_case, report.message};
}

Verdict Evaluator::score_math(const Task& task, std::string_view raw) const {
  const auto answer = try_extract_final_answer(raw);
  if (!answer) return {false, Detail::kUnparseable, std::nullopt, "no ANSWER line"};
  if (task.answer && match_answer(*answer, *task.answer)) {
    return {true, Detail::kPassedAll, std::nullopt, {}};
  }
  return {false, Detail::kWrongAnswer, std::nullopt, "got " + *answer};
}

}  // namespace decayprobe
