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

#ifndef DECAYPROBE_SANDBOX_H_
#define DECAYPROBE_SANDBOX_H_

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "decayprobe/corpus.h"

namespace decayprobe {

struct SandboxLimits {
  std::chrono::milliseconds per_case_timeout{5000};
  std::size_t memory_cap = std::size_t{256} << 20;  // bytes, address space
};

// Runner wire protocol. One RunRequest JSON document goes to the runner's
// stdin, one RunResult JSON document comes back on stdout:
//
//   request:  {"code": str, "entrypoint": str, "per_case_timeout": seconds,
//              "cases": [{"input": str, "expected": str}, ...]}
//   result:   {"harness_ok": bool,
//              "per_case": [{"status": "pass"|"fail"|"error"|"timeout",
//                            "actual": str|null, "message": str}, ...]}
struct RunRequest {
  std::string code;
  std::string entrypoint;  // empty: first top-level function
  std::vector<TestCase> cases;
  std::chrono::milliseconds per_case_timeout{5000};
};

enum class CaseStatus { kPass, kFail, kError, kTimeout };

struct CaseResult {
  CaseStatus status = CaseStatus::kError;
  std::optional<std::string> actual;
  std::string message;
};

struct RunResult {
  std::vector<CaseResult> per_case;
  bool harness_ok = false;
  // Set by the supervisor, not the runner.
  bool killed_on_deadline = false;
  bool crashed = false;  // runner died without producing a result
  std::string diagnostics;
};

std::string encode_run_request(const RunRequest& request);
// Throws SandboxUnavailable when `json_text` is not a RunResult.
RunResult decode_run_result(const std::string& json_text);

// Spawns `command` once per run, applies the memory cap to the child and
// kills it once the wall-clock budget (per-case timeout times cases, plus
// one second of grace) is spent.
class SandboxRunner {
 public:
  explicit SandboxRunner(std::vector<std::string> command, SandboxLimits limits = {});

  // Throws SandboxUnavailable if the runner cannot be started or answers
  // with something other than a RunResult.
  RunResult run(const RunRequest& request) const;

  const SandboxLimits& limits() const { return limits_; }
  const std::vector<std::string>& command() const { return command_; }

 private:
  std::vector<std::string> command_;
  SandboxLimits limits_;
};

}  // namespace decayprobe

#endif  // DECAYPROBE_SANDBOX_H_
