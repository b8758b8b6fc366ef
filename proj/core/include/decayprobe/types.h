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

#ifndef DECAYPROBE_TYPES_H_
#define DECAYPROBE_TYPES_H_

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace decayprobe {

enum class TaskKind { kCode, kMath };

enum class Method { kTruncation, kDeletion, kTypos };

inline constexpr std::array<Method, 3> kAllMethods = {
    Method::kTruncation, Method::kDeletion, Method::kTypos};

std::string_view to_string(TaskKind kind);
std::string_view to_string(Method method);
std::optional<TaskKind> parse_task_kind(std::string_view text);
std::optional<Method> parse_method(std::string_view text);

// One rung of an obfuscation ladder. Stored as integer tenths so that
// levels compare and hash exactly; rate() gives the augmentation rate.
class Level {
 public:
  static constexpr int kCount = 11;

  constexpr Level() = default;
  static constexpr Level from_index(int tenths) { return Level(tenths); }
  // Nearest ladder level to `rate`, or nullopt when rate is off-grid.
  static std::optional<Level> from_rate(double rate);

  constexpr int index() const { return tenths_; }
  constexpr double rate() const { return tenths_ / 10.0; }
  constexpr bool is_baseline() const { return tenths_ == 0; }

  // "0.0", "0.1", ..., "1.0"
  std::string label() const;

  friend constexpr auto operator<=>(Level, Level) = default;

 private:
  constexpr explicit Level(int tenths) : tenths_(tenths) {}
  int tenths_ = 0;
};

}  // namespace decayprobe

#endif  // DECAYPROBE_TYPES_H_
