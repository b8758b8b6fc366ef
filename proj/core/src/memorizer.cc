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

#include "decayprobe/memorizer.h"

#include <algorithm>
#include <stdexcept>

#include "utf8.h"

namespace decayprobe {
namespace {

// Sorted, de-duplicated character n-grams (as UTF-8 byte strings).
std::vector<std::string> ngram_set(std::string_view text, int n) {
  const auto units = utf8::segment(text);
  std::vector<std::string> grams;
  const auto width = static_cast<std::size_t>(n);
  if (units.size() >= width) {
    grams.reserve(units.size() - width + 1);
    for (std::size_t i = 0; i + width <= units.size(); ++i) {
      const std::size_t begin = units[i].offset;
      const std::size_t end = units[i + width - 1].offset + units[i + width - 1].length;
      grams.emplace_back(text.substr(begin, end - begin));
    }
  }
  std::sort(grams.begin(), grams.end());
  grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
  return grams;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t shared = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++shared;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
}

void check_memory(const MemorizerMemory& memory) {
  if (memory.ngram_size < 1) throw std::invalid_argument("ngram_size must be >= 1");
  if (!(memory.threshold >= 0.0 && memory.threshold <= 1.0)) {
    throw std::invalid_argument("memorizer threshold must lie in [0, 1]");
  }
}

struct Match {
  const MemorizedEntry* entry = nullptr;
  double score = -1.0;
};

// Best-scoring entry over precomputed n-gram sets; ties keep the earlier one.
Match best_match(const MemorizerMemory& memory,
                 const std::vector<std::vector<std::string>>& entry_grams,
                 const std::vector<std::string>& query) {
  Match best;
  for (std::size_t i = 0; i < memory.entries.size(); ++i) {
    const double s = jaccard(query, entry_grams[i]);
    if (s > best.score) best = {&memory.entries[i], s};
  }
  return best;
}

std::vector<std::vector<std::string>> index_entries(const MemorizerMemory& memory) {
  std::vector<std::vector<std::string>> grams;
  grams.reserve(memory.entries.size());
  for (const MemorizedEntry& entry : memory.entries) {
    grams.push_back(ngram_set(entry.prompt, memory.ngram_size));
  }
  return grams;
}

}  // namespace

double similarity(std::string_view a, std::string_view b, int n) {
  if (n < 1) throw std::invalid_argument("n-gram size must be >= 1");
  return jaccard(ngram_set(a, n), ngram_set(b, n));
}

std::string memorizer_respond(const MemorizerMemory& memory, std::string_view prompt) {
  check_memory(memory);
  const Match m =
      best_match(memory, index_entries(memory), ngram_set(prompt, memory.ngram_size));
  return m.entry && m.score >= memory.threshold ? m.entry->solution : std::string(kNonAnswer);
}

MemorizerMemory memory_from_corpus(const Corpus& corpus, int ngram_size, double threshold) {
  MemorizerMemory memory;
  memory.ngram_size = ngram_size;
  memory.threshold = threshold;
  check_memory(memory);
  for (const Task& task : corpus.tasks) {
    if (task.kind == TaskKind::kCode) {
      if (!task.solution) continue;
      memory.entries.push_back({task.prompt, "```python\n" + *task.solution + "\n```\n"});
    } else if (task.answer) {
      memory.entries.push_back({task.prompt, "I recognise this problem.\nANSWER: " + *task.answer});
    }
  }
  return memory;
}

// ---- MemorizingModel ----

MemorizingModel::MemorizingModel(std::string name, std::vector<MemorizerMemory> tiers,
                                 int max_reprompts)
    : name_(std::move(name)), tiers_(std::move(tiers)), max_reprompts_(max_reprompts) {
  for (const auto& tier : tiers_) {
    check_memory(tier);
    grams_.push_back(index_entries(tier));
  }
}

std::string MemorizingModel::respond(std::string_view prompt) const {
  const auto body = strip_prompt_template(prompt);
  const std::string_view text = body ? std::string_view(*body) : prompt;
  Match best;
  for (std::size_t t = 0; t < tiers_.size(); ++t) {
    const Match m = best_match(tiers_[t], grams_[t], ngram_set(text, tiers_[t].ngram_size));
    if (m.entry && m.score >= tiers_[t].threshold && m.score > best.score) best = m;
  }
  return best.entry ? best.entry->solution : std::string(kNonAnswer);
}

std::string MemorizingModel::complete(std::span<const ChatMessage> messages) {
  ++calls_;
  for (const ChatMessage& m : messages) {
    if (m.role == "user") return respond(m.content);
  }
  return std::string(kNonAnswer);
}

}  // namespace decayprobe
