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

#include "decayprobe/sandbox.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

#include "decayprobe/errors.h"
#include "nlohmann/json.hpp"

namespace decayprobe {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr auto kGrace = std::chrono::seconds(1);

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw SandboxUnavailable(std::string("pipe2: ") + std::strerror(errno));
  }
  return {Fd(fds[0]), Fd(fds[1])};
}

CaseStatus parse_status(const std::string& s) {
  if (s == "pass") return CaseStatus::kPass;
  if (s == "fail") return CaseStatus::kFail;
  if (s == "timeout") return CaseStatus::kTimeout;
  if (s == "error") return CaseStatus::kError;
  throw SandboxUnavailable("runner reported unknown case status \"" + s + "\"");
}

}  // namespace

std::string encode_run_request(const RunRequest& request) {
  json doc;
  doc["code"] = request.code;
  doc["entrypoint"] = request.entrypoint;
  doc["per_case_timeout"] =
      std::chrono::duration<double>(request.per_case_timeout).count();
  doc["cases"] = json::array();
  for (const TestCase& tc : request.cases) {
    doc["cases"].push_back({{"input", tc.input}, {"expected", tc.expected}});
  }
  return doc.dump();
}

RunResult decode_run_result(const std::string& json_text) {
  const json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("harness_ok") ||
      !doc["harness_ok"].is_boolean()) {
    throw SandboxUnavailable("runner output is not a RunResult document");
  }
  RunResult result;
  result.harness_ok = doc["harness_ok"].get<bool>();
  if (const auto it = doc.find("per_case"); it != doc.end() && it->is_array()) {
    for (const json& entry : *it) {
      if (!entry.is_object() || !entry.contains("status") || !entry["status"].is_string()) {
        throw SandboxUnavailable("runner per_case entry lacks a status");
      }
      CaseResult cr;
      cr.status = parse_status(entry["status"].get<std::string>());
      if (const auto a = entry.find("actual"); a != entry.end() && !a->is_null()) {
        cr.actual = a->is_string() ? a->get<std::string>() : a->dump();
      }
      cr.message = entry.value("message", "");
      result.per_case.push_back(std::move(cr));
    }
  }
  return result;
}

SandboxRunner::SandboxRunner(std::vector<std::string> command, SandboxLimits limits)
    : command_(std::move(command)), limits_(limits) {}

RunResult SandboxRunner::run(const RunRequest& request) const {
  if (command_.empty()) throw SandboxUnavailable("no sandbox runner command configured");
  ignore_sigpipe();

  const std::string payload = encode_run_request(request);
  std::vector<char*> argv;
  for (const std::string& arg : command_) argv.push_back(const_cast<char*>(arg.c_str()));
  argv.push_back(nullptr);

  Pipe in = make_pipe();
  Pipe out = make_pipe();
  Pipe err = make_pipe();
  Pipe exec_status = make_pipe();

  const pid_t pid = ::fork();
  if (pid < 0) throw SandboxUnavailable(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    if (limits_.memory_cap > 0) {
      const rlimit cap{limits_.memory_cap, limits_.memory_cap};
      ::setrlimit(RLIMIT_AS, &cap);
    }
    ::dup2(in.read.get(), STDIN_FILENO);
    ::dup2(out.write.get(), STDOUT_FILENO);
    ::dup2(err.write.get(), STDERR_FILENO);
    ::execvp(argv[0], argv.data());
    const int code = errno;
    [[maybe_unused]] auto n = ::write(exec_status.write.get(), &code, sizeof(code));
    ::_exit(127);
  }

  in.read.reset();
  out.write.reset();
  err.write.reset();
  exec_status.write.reset();

  int exec_errno = 0;
  if (::read(exec_status.read.get(), &exec_errno, sizeof(exec_errno)) ==
      static_cast<ssize_t>(sizeof(exec_errno))) {
    ::waitpid(pid, nullptr, 0);
    throw SandboxUnavailable("cannot start runner \"" + command_.front() +
                             "\": " + std::strerror(exec_errno));
  }

  for (int fd : {in.write.get(), out.read.get(), err.read.get()}) {
    ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
  }

  const auto budget = request.per_case_timeout * static_cast<long>(std::max<std::size_t>(1, request.cases.size())) + kGrace;
  const auto deadline = Clock::now() + budget;
  std::string stdout_text;
  std::string stderr_text;
  std::size_t written = 0;
  bool killed = false;
  char buf[65536];

  while (out.read.get() >= 0 || err.read.get() >= 0) {
    const auto now = Clock::now();
    if (now >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      killed = true;
      break;
    }
    pollfd fds[3];
    nfds_t n = 0;
    int in_slot = -1, out_slot = -1, err_slot = -1;
    if (in.write.get() >= 0) {
      in_slot = static_cast<int>(n);
      fds[n++] = {in.write.get(), POLLOUT, 0};
    }
    if (out.read.get() >= 0) {
      out_slot = static_cast<int>(n);
      fds[n++] = {out.read.get(), POLLIN, 0};
    }
    if (err.read.get() >= 0) {
      err_slot = static_cast<int>(n);
      fds[n++] = {err.read.get(), POLLIN, 0};
    }
    const auto wait_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
    if (::poll(fds, n, static_cast<int>(std::min<long long>(wait_ms, 1000))) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (in_slot >= 0 && fds[in_slot].revents) {
      if (fds[in_slot].revents & (POLLERR | POLLHUP)) {
        in.write.reset();
      } else {
        const ssize_t w = ::write(in.write.get(), payload.data() + written, payload.size() - written);
        if (w > 0) written += static_cast<std::size_t>(w);
        if (w < 0 && errno != EAGAIN) in.write.reset();
        if (written == payload.size()) in.write.reset();
      }
    }
    for (auto [slot, fd, text] : {std::tuple{out_slot, &out.read, &stdout_text},
                                  std::tuple{err_slot, &err.read, &stderr_text}}) {
      if (slot < 0 || !fds[slot].revents) continue;
      const ssize_t r = ::read(fd->get(), buf, sizeof(buf));
      if (r > 0) {
        text->append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || errno != EAGAIN) {
        fd->reset();
      }
    }
  }

  int status = 0;
  ::waitpid(pid, &status, 0);

  RunResult result;
  result.diagnostics = stderr_text.substr(0, 4096);
  if (killed) {
    result.killed_on_deadline = true;
    result.harness_ok = true;
    return result;
  }
  if (WIFSIGNALED(status)) {
    result.crashed = true;
    result.harness_ok = true;
    result.diagnostics = "runner killed by signal " + std::to_string(WTERMSIG(status)) +
                         (stderr_text.empty() ? "" : ": " + result.diagnostics);
    return result;
  }
  const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  RunResult decoded;
  try {
    decoded = decode_run_result(stdout_text);
  } catch (const SandboxUnavailable&) {
    throw SandboxUnavailable("runner exited with code " + std::to_string(exit_code) +
                             " without a result: " + stderr_text.substr(0, 500));
  }
  if (!decoded.harness_ok || exit_code != 0) {
    throw SandboxUnavailable("runner reported a harness failure (exit " +
                             std::to_string(exit_code) + "): " + stderr_text.substr(0, 500));
  }
  decoded.diagnostics = result.diagnostics;
  return decoded;
}

}  // namespace decayprobe
