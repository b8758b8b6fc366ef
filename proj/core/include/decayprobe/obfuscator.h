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

#ifndef DECAYPROBE_OBFUSCATOR_H_
#define DECAYPROBE_OBFUSCATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "decayprobe/corpus.h"
#include "decayprobe/types.h"

namespace decayprobe {

struct ObfuscationSpec {
  Method method = Method::kTruncation;
  double rate = 0.0;  // augmentation rate in [0, 1]
  std::uint64_t seed = 0;

  friend bool operator==(const ObfuscationSpec&, const ObfuscationSpec&) = default;
};

struct ObfuscatedVariant {
  std::string task_id;
  ObfuscationSpec spec;
  std::string text;

  friend bool operator==(const ObfuscatedVariant&, const ObfuscatedVariant&) = default;
};

// Eleven variants at rates 0.0, 0.1, ..., 1.0; the first is the prompt as-is.
struct Ladder {
  std::string task_id;
  Method method = Method::kTruncation;
  std::vector<ObfuscatedVariant> variants;

  friend bool operator==(const Ladder&, const Ladder&) = default;
};

// Neighbor table for typo injection, keyed by Unicode scalar value. The
// bundled table covers printable ASCII on a US QWERTY layout: each key maps
// to the physically adjacent keys plus its own shifted/unshifted twin, so
// '1' -> {'2', 'q', 'w', '!'}.
class KeyboardLayout {
 public:
  static const KeyboardLayout& qwerty();
  // {"version": N, "neighbors": {"a": ["q", ...], ...}}
  static KeyboardLayout from_json(std::string_view json_text);

  std::span<const char32_t> neighbors(char32_t c) const;
  int version() const { return version_; }
  std::size_t size() const { return table_.size(); }

 private:
  int version_ = 0;
  std::unordered_map<char32_t, std::vector<char32_t>> table_;
};

// Word count as used by all three methods: maximal runs of non-whitespace.
std::size_t count_words(std::string_view text);
std::vector<std::string_view> split_words(std::string_view text);
// Unicode scalar values (invalid UTF-8 bytes count one each).
std::size_t count_chars(std::string_view text);

// First round((1 - rate) * chars) characters.
std::string truncate(std::string_view text, double rate);

// Removes exactly round(rate * words) words chosen uniformly without
// replacement; survivors are joined with single spaces. Rate 0 returns the
// input unchanged.
std::string delete_words(std::string_view text, double rate, std::uint64_t seed);

// Picks round(rate * words) words uniformly without replacement and swaps
// one character in each for a keyboard neighbor. Whitespace is untouched.
// Words with no character in the layout cannot be mistyped and are never
// picked, so the count saturates at the number of eligible words.
std::string apply_typos(std::string_view text, double rate, std::uint64_t seed,
                        const KeyboardLayout& layout = KeyboardLayout::qwerty());

std::string obfuscate(std::string_view text, const ObfuscationSpec& spec);

// Seed for one rung, independent of every other rung and task.
std::uint64_t derive_variant_seed(std::uint64_t master_seed, std::string_view task_id,
                                  Method method, Level level);

Ladder build_ladder(const Task& task, Method method, std::uint64_t master_seed);

// Corpus line for an obfuscated task: the task record with `prompt`
// replaced by the variant text and an added "spec" object.
std::string serialize_variant(const Task& task, const ObfuscatedVariant& variant);

}  // namespace decayprobe

#endif  // DECAYPROBE_OBFUSCATOR_H_
