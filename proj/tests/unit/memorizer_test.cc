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

#include <gtest/gtest.h>

#include <set>

#include "decayprobe/gateway.h"
#include "decayprobe/memorizer.h"
#include "decayprobe/obfuscator.h"
#include "synthetic.h"

namespace decayprobe {
namespace {

// Independent character n-gram Jaccard over bytes of ASCII text.
double oracle_jaccard(const std::string& a, const std::string& b, std::size_t n) {
  std::set<std::string> ga, gb;
  for (std::size_t i = 0; i + n <= a.size(); ++i) ga.insert(a.substr(i, n));
  for (std::size_t i = 0; i + n <= b.size(); ++i) gb.insert(b.substr(i, n));
  std::size_t inter = 0;
  for (const auto& g : ga) inter += gb.count(g);
  const std::size_t uni = ga.size() + gb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

TEST(Similarity, Examples) {
  EXPECT_DOUBLE_EQ(similarity("abc", "abc", 3), 1.0);
  EXPECT_DOUBLE_EQ(similarity("abc", "xyz", 3), 0.0);
  EXPECT_DOUBLE_EQ(similarity("abcd", "abce", 3), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(similarity("", "", 3), 0.0);
  EXPECT_DOUBLE_EQ(similarity("ab", "ab", 3), 0.0);  // no 3-grams on either side
  EXPECT_THROW(similarity("a", "b", 0), std::invalid_argument);
}

TEST(Similarity, SymmetricBoundedAndMatchesOracle) {
  const Corpus c = testing::make_code_corpus("sim", 6, 3);
  for (const Task& x : c.tasks) {
    for (const Task& y : c.tasks) {
      const double s = similarity(x.prompt, y.prompt, 3);
      EXPECT_DOUBLE_EQ(s, similarity(y.prompt, x.prompt, 3));
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
      EXPECT_NEAR(s, oracle_jaccard(x.prompt, y.prompt, 3), 1e-12);
    }
  }
}

TEST(Similarity, CountsScalarsNotBytes) {
  EXPECT_DOUBLE_EQ(similarity("ééé", "ééé", 3), 1.0);
  EXPECT_DOUBLE_EQ(similarity("éé", "éé", 3), 0.0);
}

MemorizerMemory one_entry(const std::string& prompt) {
  MemorizerMemory m;
  m.entries.push_back({prompt, "SOLUTION"});
  return m;
}

TEST(MemorizerRespond, ExactPromptReturnsSolution) {
  EXPECT_EQ(memorizer_respond(one_entry("find the median of two arrays"), "find the median of two arrays"),
            "SOLUTION");
}

TEST(MemorizerRespond, EmptyMemoryReturnsNonAnswer) {
  EXPECT_EQ(memorizer_respond(MemorizerMemory{}, "anything"), kNonAnswer);
}

TEST(MemorizerRespond, HalfDeletedPromptStillRecognised) {
  const std::string prompt = testing::make_code_corpus("mem", 1, 12).tasks[0].prompt;
  const std::string deleted = delete_words(prompt, 0.5, 77);
  const double oracle = oracle_jaccard(prompt, deleted, 3);
  ASSERT_GE(oracle, 0.35) << "oracle says the pair is below threshold";
  EXPECT_EQ(memorizer_respond(one_entry(prompt), deleted), "SOLUTION");
}

TEST(MemorizerRespond, UnrelatedPromptGetsNonAnswer) {
  EXPECT_EQ(memorizer_respond(one_entry("reverse the digits of a signed integer"),
                              "count vowels in a sentence quickly"),
            kNonAnswer);
}

TEST(MemorizerRespond, ValidatesMemory) {
  MemorizerMemory m = one_entry("x");
  m.threshold = 1.5;
  EXPECT_THROW(memorizer_respond(m, "x"), std::invalid_argument);
  m.threshold = 0.5;
  m.ngram_size = 0;
  EXPECT_THROW(memorizer_respond(m, "x"), std::invalid_argument);
}

TEST(MemoryFromCorpus, FormatsCodeAndMathSolutions) {
  const auto code = memory_from_corpus(testing::make_code_corpus("c", 2, 1), 3, 0.4);
  ASSERT_EQ(code.entries.size(), 2u);
  EXPECT_EQ(code.entries[0].solution.rfind("```python\n", 0), 0u);
  EXPECT_DOUBLE_EQ(code.threshold, 0.4);
  const auto math = memory_from_corpus(testing::make_math_corpus("m", 2, 1), 3, 0.35);
  EXPECT_NE(math.entries[0].solution.find("ANSWER: "), std::string::npos);
}

TEST(MemorizingModel, StripsTemplateAndPicksClosestAcrossTiers) {
  MemorizerMemory loose = one_entry("alpha beta gamma delta epsilon zeta");
  loose.entries[0].solution = "LOOSE";
  MemorizerMemory strict = one_entry("alpha beta gamma delta epsilon theta");
  strict.entries[0].solution = "STRICT";
  strict.threshold = 0.9;
  MemorizingModel model("m", {loose, strict});
  // Exact match with the strict entry beats the loose tier's weaker match.
  EXPECT_EQ(model.respond(render_prompt("alpha beta gamma delta epsilon theta", TaskKind::kCode)), "STRICT");
  EXPECT_EQ(model.respond(render_prompt("alpha beta gamma delta epsilon zeta", TaskKind::kMath)), "LOOSE");
  // Perturbed: only the loose tier still recognises it.
  EXPECT_EQ(model.respond("alpha beta gamma delta"), "LOOSE");
  EXPECT_EQ(model.respond("completely different words"), kNonAnswer);
}

TEST(MemorizingModel, CountsCallsAndReadsFirstUserMessage) {
  MemorizingModel model("m", {one_entry("alpha beta gamma")});
  const std::vector<ChatMessage> msgs = {{"system", "ignored"}, {"user", "alpha beta gamma"},
                                         {"assistant", "x"}, {"user", "fix it"}};
  EXPECT_EQ(model.complete(msgs), "SOLUTION");
  EXPECT_EQ(model.calls(), 1);
  EXPECT_EQ(model.max_reprompts(), 3);
}

}  // namespace
}  // namespace decayprobe
