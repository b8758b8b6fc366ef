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

#include "decayprobe/store.h"

#include <sstream>

#include "decayprobe/errors.h"
#include "nlohmann/json.hpp"

namespace decayprobe {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kLogName = "outcomes.ndjson";
constexpr const char* kManifestName = "manifest.json";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

// Loads the log, cutting off a trailing partial record left by a crash.
std::map<OutcomeKey, OutcomeRecord> load_log(const fs::path& path, bool repair) {
  std::map<OutcomeKey, OutcomeRecord> records;
  if (!fs::exists(path)) return records;
  const std::string text = read_file(path);
  const std::size_t complete = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
  if (complete < text.size() && repair) fs::resize_file(path, complete);

  std::size_t pos = 0;
  std::size_t line_number = 0;
  while (pos < complete) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_number;
    if (line.empty()) continue;
    OutcomeRecord record;
    try {
      record = decode_outcome(line);
    } catch (const StoreCorruption& e) {
      throw StoreCorruption(path.string() + ":" + std::to_string(line_number) + ": " + e.what());
    }
    records.emplace(key_of(record), std::move(record));
  }
  return records;
}

}  // namespace

OutcomeKey key_of(const OutcomeRecord& r) {
  return {r.dataset, r.outcome.task_id, r.outcome.model, r.outcome.method, r.outcome.level};
}

std::string encode_outcome(const OutcomeRecord& r) {
  json doc;
  doc["dataset"] = r.dataset;
  doc["task_id"] = r.outcome.task_id;
  doc["model"] = r.outcome.model;
  doc["method"] = to_string(r.outcome.method);
  doc["level"] = r.outcome.level.label();
  doc["seed"] = r.variant_seed;
  doc["correct"] = r.outcome.correct;
  doc["detail"] = to_string(r.outcome.detail);
  if (r.outcome.failed_case) doc["failed_case"] = *r.outcome.failed_case;
  if (!r.outcome.message.empty()) doc["message"] = r.outcome.message;
  doc["attempts"] = r.attempts;
  doc["from_cache"] = r.from_cache;
  doc["duration_ms"] = r.outcome.duration.count();
  return doc.dump();
}

OutcomeRecord decode_outcome(std::string_view line) {
  const json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw StoreCorruption("record is not a JSON object");
  try {
    OutcomeRecord r;
    r.dataset = doc.at("dataset").get<std::string>();
    r.outcome.task_id = doc.at("task_id").get<std::string>();
    r.outcome.model = doc.at("model").get<std::string>();
    const auto method = parse_method(doc.at("method").get<std::string>());
    const auto level = Level::from_rate(std::stod(doc.at("level").get<std::string>()));
    const auto detail = parse_detail(doc.at("detail").get<std::string>());
    if (!method || !level || !detail) throw StoreCorruption("bad method, level or detail");
    r.outcome.method = *method;
    r.outcome.level = *level;
    r.outcome.detail = *detail;
    r.variant_seed = doc.at("seed").get<std::uint64_t>();
    r.outcome.correct = doc.at("correct").get<bool>();
    if (doc.contains("failed_case")) r.outcome.failed_case = doc["failed_case"].get<int>();
    r.outcome.message = doc.value("message", "");
    r.attempts = doc.value("attempts", 0);
    r.from_cache = doc.value("from_cache", false);
    r.outcome.duration = std::chrono::milliseconds(doc.value("duration_ms", 0LL));
    return r;
  } catch (const json::exception& e) {
    throw StoreCorruption(std::string("malformed outcome record: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw StoreCorruption("malformed level");
  }
}

ResultsStore ResultsStore::open(const fs::path& dir, const std::string& manifest) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create store directory " + dir.string() + ": " + ec.message());

  ResultsStore store;
  store.dir_ = dir;
  store.manifest_ = manifest;
  const fs::path manifest_path = dir / kManifestName;
  if (fs::exists(manifest_path)) {
    if (trim_newlines(read_file(manifest_path)) != manifest) {
      throw ConfigError("store at " + dir.string() +
                        " was produced by a different configuration; use a fresh output_dir");
    }
  } else {
    std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + manifest_path.string());
    out << manifest << '\n';
  }
  store.records_ = load_log(dir / kLogName, /*repair=*/true);
  store.log_ = std::make_unique<std::ofstream>(dir / kLogName, std::ios::binary | std::ios::app);
  if (!*store.log_) throw IoError("cannot append to " + (dir / kLogName).string());
  store.mutex_ = std::make_unique<std::mutex>();
  return store;
}

ResultsStore ResultsStore::read(const fs::path& dir) {
  if (!fs::exists(dir / kLogName)) throw IoError("no outcome log under " + dir.string());
  ResultsStore store;
  store.dir_ = dir;
  if (fs::exists(dir / kManifestName)) store.manifest_ = trim_newlines(read_file(dir / kManifestName));
  store.records_ = load_log(dir / kLogName, /*repair=*/false);
  store.mutex_ = std::make_unique<std::mutex>();
  return store;
}

ResultsStore::ResultsStore(ResultsStore&&) noexcept = default;
ResultsStore& ResultsStore::operator=(ResultsStore&&) noexcept = default;
ResultsStore::~ResultsStore() = default;

bool ResultsStore::contains(const OutcomeKey& key) const {
  std::lock_guard lock(*mutex_);
  return records_.contains(key);
}

bool ResultsStore::append(const OutcomeRecord& record) {
  if (!log_) throw IoError("store opened read-only");
  std::lock_guard lock(*mutex_);
  const OutcomeKey key = key_of(record);
  if (records_.contains(key)) return false;
  *log_ << encode_outcome(record) << '\n';
  log_->flush();
  if (!*log_) throw IoError("write to outcome log failed");
  records_.emplace(key, record);
  return true;
}

std::vector<OutcomeRecord> ResultsStore::records() const {
  std::lock_guard lock(*mutex_);
  std::vector<OutcomeRecord> out;
  out.reserve(records_.size());
  for (const auto& [key, record] : records_) out.push_back(record);
  return out;
}

std::size_t ResultsStore::size() const {
  std::lock_guard lock(*mutex_);
  return records_.size();
}

}  // namespace decayprobe
