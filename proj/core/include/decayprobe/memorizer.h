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

#ifndef DECAYPROBE_MEMORIZER_H_
#define DECAYPROBE_MEMORIZER_H_

#include <string>
#include <string_view>
#include <vector>

#include "decayprobe/corpus.h"
#include "decayprobe/gateway.h"

namespace decayprobe {

// Jaccard similarity of the character n-gram sets of `a` and `b`.
// 0.0 when both sets are empty. Requires n >= 1.
double similarity(std::string_view a, std::string_view b, int n);

struct MemorizedEntry {
  std::string prompt;
  std::string solution;
};

struct MemorizerMemory {
  std::vector<MemorizedEntry> entries;
  int ngram_size = 3;
  double threshold = 0.35;
};

inline constexpr std::string_view kNonAnswer =
    "I do not recognise this problem and cannot provide a solution.";

// Stored solution of the most similar memorized prompt when that similarity
// reaches the threshold; kNonAnswer otherwise. Ties go to the earlier entry.
std::string memorizer_respond(const MemorizerMemory& memory, std::string_view prompt);

// Memory whose entries are the corpus prompts paired with a reply that
// solves them: a fenced block around Task::solution for code tasks, an
// ANSWER line for math tasks. Code tasks without a solution are skipped.
MemorizerMemory memory_from_corpus(const Corpus& corpus, int ngram_size, double threshold);

// Deterministic stand-in for an LLM that answers by recall. It reads the
// first user message, strips the prompt template and answers with the
// closest entry among tiers whose threshold it clears (earlier tier on ties).
//
// A single loose tier simulates eager pattern matching on contaminated
// data. Adding a strict tier over a second corpus simulates a model that
// can solve unseen tasks only while their text stays mostly intact.
class MemorizingModel : public ChatModel {
 public:
  MemorizingModel(std::string name, std::vector<MemorizerMemory> tiers,
                  int max_reprompts = 3);

  const std::string& name() const override { return name_; }
  int max_reprompts() const override { return max_reprompts_; }
  std::string complete(std::span<const ChatMessage> messages) override;

  std::string respond(std::string_view prompt) const;
  int calls() const { return calls_.load(); }

 private:
  std::string name_;
  std::vector<MemorizerMemory> tiers_;
  // n-gram sets of every memorized prompt, per tier.
  std::vector<std::vector<std::vector<std::string>>> grams_;
  int max_reprompts_;
  std::atomic<int> calls_{0};
};

}  // namespace decayprobe

#endif  // DECAYPROBE_MEMORIZER_H_
