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

// UTF-8 segmentation that never rewrites bytes: each unit is either one
// well-formed scalar value or one stray byte.

#ifndef DECAYPROBE_SRC_UTF8_H_
#define DECAYPROBE_SRC_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace decayprobe::utf8 {

struct Unit {
  std::size_t offset = 0;
  std::size_t length = 0;
  char32_t code = 0;  // U+FFFD for a stray byte
};

std::vector<Unit> segment(std::string_view text);
void append(std::string& out, char32_t code);
std::string encode(char32_t code);
// Python str.split() whitespace.
bool is_space(char32_t code);

// Byte ranges of maximal non-whitespace runs.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};
std::vector<Span> word_spans(std::string_view text);

}  // namespace decayprobe::utf8

#endif  // DECAYPROBE_SRC_UTF8_H_
