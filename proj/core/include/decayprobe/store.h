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

#ifndef DECAYPROBE_STORE_H_
#define DECAYPROBE_STORE_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "decayprobe/evaluator.h"

namespace decayprobe {

struct OutcomeRecord {
  std::string dataset;
  EvalOutcome outcome;
  std::uint64_t variant_seed = 0;
  int attempts = 0;
  bool from_cache = false;
};

using OutcomeKey = std::tuple<std::string, std::string, std::string, Method, Level>;
OutcomeKey key_of(const OutcomeRecord& record);

std::string encode_outcome(const OutcomeRecord& record);
OutcomeRecord decode_outcome(std::string_view line);

// Append-only outcome log plus manifest, under <dir>/outcomes.ndjson and
// <dir>/manifest.json. Opening an existing store with a different manifest
// throws ConfigError. A final line cut short by a crash is dropped; any
// other malformed line throws StoreCorruption.
class ResultsStore {
 public:
  static ResultsStore open(const std::filesystem::path& dir, const std::string& manifest);
  // Read-only view of an existing store.
  static ResultsStore read(const std::filesystem::path& dir);

  ResultsStore(ResultsStore&&) noexcept;
  ResultsStore& operator=(ResultsStore&&) noexcept;
  ~ResultsStore();

  bool contains(const OutcomeKey& key) const;
  // Returns false (and writes nothing) if the key is already present.
  bool append(const OutcomeRecord& record);

  std::vector<OutcomeRecord> records() const;
  std::size_t size() const;
  const std::string& manifest() const { return manifest_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  ResultsStore() = default;

  std::filesystem::path dir_;
  std::string manifest_;
  std::map<OutcomeKey, OutcomeRecord> records_;
  std::unique_ptr<std::ofstream> log_;
  std::unique_ptr<std::mutex> mutex_;
};

}  // namespace decayprobe

#endif  // DECAYPROBE_STORE_H_
