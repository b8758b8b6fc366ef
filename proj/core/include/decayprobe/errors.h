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

#ifndef DECAYPROBE_ERRORS_H_
#define DECAYPROBE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace decayprobe {

// Root of every error the library throws on purpose. Candidate-code
// failures are never reported through exceptions; they are outcome values.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- corpus ----

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, std::string reason)
      : Error("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(std::move(reason)) {}
  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(std::string id)
      : Error("duplicate task id \"" + id + "\""), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class NonMonotoneRates : public Error {
 public:
  using Error::Error;
};

class ValueOutOfRange : public Error {
 public:
  using Error::Error;
};

// ---- gateway / evaluator ----

class Unparseable : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class AuthError : public Error {
 public:
  using Error::Error;
};

// The sandbox harness itself is missing or broken. Distinct from a
// candidate solution failing.
class SandboxUnavailable : public Error {
 public:
  using Error::Error;
};

// ---- analytics ----

class MissingBaseline : public Error {
 public:
  using Error::Error;
};

class ZeroBaseline : public Error {
 public:
  using Error::Error;
};

class InsufficientLevels : public Error {
 public:
  using Error::Error;
};

// ---- orchestration ----

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StoreCorruption : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace decayprobe

#endif  // DECAYPROBE_ERRORS_H_
