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

#include "decayprobe/corpus.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "decayprobe/errors.h"
#include "nlohmann/json.hpp"

namespace decayprobe {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

void check_suite(const std::vector<TestCase>& suite, std::string_view field,
                 std::vector<std::string>& out) {
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const std::string where = std::string(field) + "[" + std::to_string(i) + "]";
    const json input = json::parse(suite[i].input, nullptr, false);
    if (input.is_discarded() || !input.is_array()) {
      out.push_back(where + ".input: must be a JSON array of arguments");
    }
    if (json::parse(suite[i].expected, nullptr, false).is_discarded()) {
      out.push_back(where + ".expected: must be a JSON value");
    }
  }
}

const std::unordered_set<std::string_view> kKnownKeys = {
    "id",     "kind",      "prompt",     "tests",    "answer", "source",
    "published", "trap_tests", "trap_label", "solution", "spec"};

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw MalformedRecord(line, std::string("missing key \"") + key + "\"");
  if (!it->is_string()) throw MalformedRecord(line, std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw MalformedRecord(line, std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<std::vector<TestCase>> optional_suite(const json& obj, const char* key,
                                                    std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_array()) throw MalformedRecord(line, std::string("\"") + key + "\" must be an array");
  std::vector<TestCase> suite;
  for (const json& entry : *it) {
    if (!entry.is_object() || !entry.contains("input") || !entry.contains("expected") ||
        !entry["input"].is_string() || !entry["expected"].is_string()) {
      throw MalformedRecord(line, std::string("\"") + key +
                                      "\" entries must be {\"input\": string, \"expected\": string}");
    }
    suite.push_back({entry["input"].get<std::string>(), entry["expected"].get<std::string>()});
  }
  return suite;
}

ordered_json suite_json(const std::vector<TestCase>& suite) {
  ordered_json arr = ordered_json::array();
  for (const TestCase& tc : suite) {
    arr.push_back(ordered_json{{"input", tc.input}, {"expected", tc.expected}});
  }
  return arr;
}

}  // namespace

const Task* Corpus::find(std::string_view id) const {
  const auto it = std::find_if(tasks.begin(), tasks.end(), [&](const Task& t) { return t.id == id; });
  return it == tasks.end() ? nullptr : &*it;
}

double BaselineCurve::value_at(double rate) const {
  if (points.empty()) return 0.0;
  if (rate <= points.front().first) return points.front().second;
  if (rate >= points.back().first) return points.back().second;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto [r1, v1] = points[i];
    if (rate <= r1) {
      const auto [r0, v0] = points[i - 1];
      return v0 + (v1 - v0) * (rate - r0) / (r1 - r0);
    }
  }
  return points.back().second;
}

std::vector<std::string> validate_task(const Task& task) {
  std::vector<std::string> out;
  if (task.id.empty()) out.push_back("id: must be non-empty");
  if (task.prompt.empty()) out.push_back("prompt: must be non-empty");

  const bool has_tests = task.tests.has_value();
  const bool has_answer = task.answer.has_value();
  if (has_tests && has_answer) {
    out.push_back("exactly one ground truth allowed");
  } else if (task.kind == TaskKind::kCode) {
    if (has_answer) {
      out.push_back("exactly one ground truth allowed");
    } else if (!has_tests) {
      out.push_back("tests: required for code tasks");
    }
  } else if (has_tests) {
    out.push_back("exactly one ground truth allowed");
  } else if (!has_answer) {
    out.push_back("answer: required for math tasks");
  }

  if (has_tests) {
    if (task.tests->empty()) out.push_back("tests: must have ≥1 entry");
    check_suite(*task.tests, "tests", out);
  }
  if (task.trap_tests) {
    if (task.trap_tests->empty()) out.push_back("trap_tests: must have ≥1 entry");
    check_suite(*task.trap_tests, "trap_tests", out);
  }
  if (task.published && !is_iso_date(*task.published)) {
    out.push_back("published: must be an ISO-8601 date (YYYY-MM-DD)");
  }
  return out;
}

Task parse_task_line(std::string_view line, std::size_t line_number) {
  const json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded()) throw MalformedRecord(line_number, "not valid JSON");
  if (!obj.is_object()) throw MalformedRecord(line_number, "record must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!kKnownKeys.contains(key)) {
      throw MalformedRecord(line_number, "unknown key \"" + key + "\"");
    }
  }

  Task task;
  task.id = require_string(obj, "id", line_number);
  const std::string kind = require_string(obj, "kind", line_number);
  const auto parsed_kind = parse_task_kind(kind);
  if (!parsed_kind) throw MalformedRecord(line_number, "kind must be \"code\" or \"math\"");
  task.kind = *parsed_kind;
  task.prompt = require_string(obj, "prompt", line_number);
  task.tests = optional_suite(obj, "tests", line_number);
  task.answer = optional_string(obj, "answer", line_number);
  task.source = optional_string(obj, "source", line_number);
  task.published = optional_string(obj, "published", line_number);
  task.trap_tests = optional_suite(obj, "trap_tests", line_number);
  task.trap_label = optional_string(obj, "trap_label", line_number);
  task.solution = optional_string(obj, "solution", line_number);
  return task;
}

std::string serialize_task(const Task& task) {
  ordered_json obj;
  obj["id"] = task.id;
  obj["kind"] = std::string(to_string(task.kind));
  obj["prompt"] = task.prompt;
  if (task.tests) obj["tests"] = suite_json(*task.tests);
  if (task.answer) obj["answer"] = *task.answer;
  if (task.source) obj["source"] = *task.source;
  if (task.published) obj["published"] = *task.published;
  if (task.trap_tests) obj["trap_tests"] = suite_json(*task.trap_tests);
  if (task.trap_label) obj["trap_label"] = *task.trap_label;
  if (task.solution) obj["solution"] = *task.solution;
  return obj.dump();
}

Corpus parse_corpus(std::string_view text, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  if (corpus.name.empty()) throw MalformedRecord(0, "corpus name must be non-empty");

  std::unordered_set<std::string> seen;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_number;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (trim(line).empty()) continue;

    Task task = parse_task_line(line, line_number);
    const auto violations = validate_task(task);
    if (!violations.empty()) {
      std::string reason = violations.front();
      for (std::size_t i = 1; i < violations.size(); ++i) reason += "; " + violations[i];
      throw MalformedRecord(line_number, reason);
    }
    if (!seen.insert(task.id).second) throw DuplicateId(task.id);
    corpus.tasks.push_back(std::move(task));
  }
  if (corpus.tasks.empty()) throw EmptyCorpus("corpus \"" + corpus.name + "\" has no tasks");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, std::optional<std::string> name) {
  return parse_corpus(read_file(path), name ? *name : path.stem().string());
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const Task& task : corpus.tasks) {
    out += serialize_task(task);
    out += '\n';
  }
  return out;
}

BaselineCurve parse_baseline_curve(std::string_view text, std::string label) {
  BaselineCurve curve;
  curve.label = std::move(label);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_number = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_number;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "rate,value") throw MalformedRecord(line_number, "expected header \"rate,value\"");
      header_seen = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) throw MalformedRecord(line_number, "expected two columns");
    double values[2];
    const std::string_view cols[2] = {trim(line.substr(0, comma)), trim(line.substr(comma + 1))};
    for (int c = 0; c < 2; ++c) {
      const auto [ptr, ec] =
          std::from_chars(cols[c].data(), cols[c].data() + cols[c].size(), values[c]);
      if (ec != std::errc() || ptr != cols[c].data() + cols[c].size()) {
        throw MalformedRecord(line_number, "non-numeric column");
      }
    }
    const auto [rate, value] = values;
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw ValueOutOfRange("line " + std::to_string(line_number) + ": rate outside [0, 1]");
    }
    if (!(value >= 0.0 && value <= 1.0)) {
      throw ValueOutOfRange("line " + std::to_string(line_number) + ": value outside [0, 1]");
    }
    if (!curve.points.empty() && rate <= curve.points.back().first) {
      throw NonMonotoneRates("line " + std::to_string(line_number) +
                             ": rates must be strictly increasing");
    }
    curve.points.emplace_back(rate, value);
  }
  if (!header_seen) throw MalformedRecord(0, "missing header \"rate,value\"");
  if (curve.points.empty()) throw MalformedRecord(line_number, "baseline curve has no points");
  return curve;
}

BaselineCurve load_baseline_curve(const std::filesystem::path& path,
                                  std::optional<std::string> label) {
  return parse_baseline_curve(read_file(path), label ? *label : path.stem().string());
}

}  // namespace decayprobe
