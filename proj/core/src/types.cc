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

#include "decayprobe/types.h"

#include <cmath>
#include <cstdio>

namespace decayprobe {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kCode:
      return "code";
    case TaskKind::kMath:
      return "math";
  }
  return "unknown";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kTruncation:
      return "truncation";
    case Method::kDeletion:
      return "deletion";
    case Method::kTypos:
      return "typos";
  }
  return "unknown";
}

std::optional<TaskKind> parse_task_kind(std::string_view text) {
  if (text == "code") return TaskKind::kCode;
  if (text == "math") return TaskKind::kMath;
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : kAllMethods) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::optional<Level> Level::from_rate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) return std::nullopt;
  const double scaled = rate * 10.0;
  const double nearest = std::round(scaled);
  if (std::abs(scaled - nearest) > 1e-9) return std::nullopt;
  return Level(static_cast<int>(nearest));
}

std::string Level::label() const {
  return std::to_string(tenths_ / 10) + '.' + std::to_string(tenths_ % 10);
}

}  // namespace decayprobe
