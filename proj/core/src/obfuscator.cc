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

#include "decayprobe/obfuscator.h"

#include <cmath>
#include <stdexcept>

#include "decayprobe/random.h"
#include "nlohmann/json.hpp"
#include "utf8.h"

namespace decayprobe {

// Generated from core/data/qwerty_adjacency.json.
extern const char* const kQwertyAdjacencyJson;

namespace {

void check_rate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("augmentation rate must lie in [0, 1]");
  }
}

std::size_t scaled_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

char32_t single_scalar(const std::string& s) {
  const auto units = utf8::segment(s);
  if (units.size() != 1 || units[0].length != s.size()) {
    throw std::invalid_argument("keyboard layout entries must be single characters: \"" + s + "\"");
  }
  return units[0].code;
}

}  // namespace

const KeyboardLayout& KeyboardLayout::qwerty() {
  static const KeyboardLayout layout = from_json(kQwertyAdjacencyJson);
  return layout;
}

KeyboardLayout KeyboardLayout::from_json(std::string_view json_text) {
  const auto doc = nlohmann::json::parse(json_text);
  KeyboardLayout layout;
  layout.version_ = doc.at("version").get<int>();
  for (const auto& [key, list] : doc.at("neighbors").items()) {
    const char32_t c = single_scalar(key);
    std::vector<char32_t> neighbors;
    for (const auto& n : list) {
      const char32_t nc = single_scalar(n.get<std::string>());
      if (nc != c) neighbors.push_back(nc);
    }
    if (!neighbors.empty()) layout.table_.emplace(c, std::move(neighbors));
  }
  return layout;
}

std::span<const char32_t> KeyboardLayout::neighbors(char32_t c) const {
  const auto it = table_.find(c);
  if (it == table_.end()) return {};
  return it->second;
}

std::size_t count_words(std::string_view text) { return utf8::word_spans(text).size(); }

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  for (const auto& span : utf8::word_spans(text)) {
    words.push_back(text.substr(span.begin, span.end - span.begin));
  }
  return words;
}

std::size_t count_chars(std::string_view text) { return utf8::segment(text).size(); }

std::string truncate(std::string_view text, double rate) {
  check_rate(rate);
  const auto units = utf8::segment(text);
  const std::size_t keep = scaled_count(1.0 - rate, units.size());
  if (keep >= units.size()) return std::string(text);
  return std::string(text.substr(0, units[keep].offset));
}

std::string delete_words(std::string_view text, double rate, std::uint64_t seed) {
  check_rate(rate);
  const auto spans = utf8::word_spans(text);
  const std::size_t k = scaled_count(rate, spans.size());
  if (k == 0) return std::string(text);

  Rng rng(seed);
  const auto removed = sample_without_replacement(rng, spans.size(), k);
  std::string out;
  std::size_t next_removed = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (next_removed < removed.size() && removed[next_removed] == i) {
      ++next_removed;
      continue;
    }
    if (!out.empty()) out.push_back(' ');
    out.append(text.substr(spans[i].begin, spans[i].end - spans[i].begin));
  }
  return out;
}

std::string apply_typos(std::string_view text, double rate, std::uint64_t seed,
                        const KeyboardLayout& layout) {
  check_rate(rate);
  const auto spans = utf8::word_spans(text);
  const std::size_t k = scaled_count(rate, spans.size());
  if (k == 0) return std::string(text);

  // Per word, the characters that have at least one neighbor.
  std::vector<std::vector<utf8::Unit>> typeable(spans.size());
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto word = text.substr(spans[i].begin, spans[i].end - spans[i].begin);
    for (utf8::Unit u : utf8::segment(word)) {
      if (!layout.neighbors(u.code).empty()) {
        u.offset += spans[i].begin;
        typeable[i].push_back(u);
      }
    }
    if (!typeable[i].empty()) eligible.push_back(i);
  }

  Rng rng(seed);
  const auto picks = sample_without_replacement(rng, eligible.size(), std::min(k, eligible.size()));
  std::string out;
  std::size_t cursor = 0;
  for (std::size_t pick : picks) {
    const auto& candidates = typeable[eligible[pick]];
    const utf8::Unit& target = candidates[uniform_below(rng, candidates.size())];
    const auto neighbors = layout.neighbors(target.code);
    const char32_t replacement = neighbors[uniform_below(rng, neighbors.size())];
    out.append(text.substr(cursor, target.offset - cursor));
    utf8::append(out, replacement);
    cursor = target.offset + target.length;
  }
  out.append(text.substr(cursor));
  return out;
}

std::string obfuscate(std::string_view text, const ObfuscationSpec& spec) {
  switch (spec.method) {
    case Method::kTruncation:
      return truncate(text, spec.rate);
    case Method::kDeletion:
      return delete_words(text, spec.rate, spec.seed);
    case Method::kTypos:
      return apply_typos(text, spec.rate, spec.seed);
  }
  throw std::invalid_argument("unknown obfuscation method");
}

std::uint64_t derive_variant_seed(std::uint64_t master_seed, std::string_view task_id,
                                  Method method, Level level) {
  std::uint64_t h = hash_combine(master_seed, stable_hash(task_id));
  h = hash_combine(h, stable_hash(to_string(method)));
  return hash_combine(h, static_cast<std::uint64_t>(level.index()));
}

Ladder build_ladder(const Task& task, Method method, std::uint64_t master_seed) {
  Ladder ladder;
  ladder.task_id = task.id;
  ladder.method = method;
  ladder.variants.reserve(Level::kCount);
  for (int i = 0; i < Level::kCount; ++i) {
    const Level level = Level::from_index(i);
    ObfuscatedVariant v;
    v.task_id = task.id;
    v.spec = {method, level.rate(), derive_variant_seed(master_seed, task.id, method, level)};
    v.text = obfuscate(task.prompt, v.spec);
    ladder.variants.push_back(std::move(v));
  }
  return ladder;
}

std::string serialize_variant(const Task& task, const ObfuscatedVariant& variant) {
  Task copy = task;
  copy.prompt = variant.text;
  auto obj = nlohmann::ordered_json::parse(serialize_task(copy));
  obj["spec"] = {{"method", std::string(to_string(variant.spec.method))},
                 {"rate", variant.spec.rate},
                 {"seed", variant.spec.seed}};
  return obj.dump();
}

}  // namespace decayprobe
