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

#include <map>
#include <set>

#include "decayprobe/random.h"
#include "decayprobe/types.h"

namespace decayprobe {
namespace {

TEST(Level, LabelsAndRates) {
  EXPECT_EQ(Level::from_index(0).label(), "0.0");
  EXPECT_EQ(Level::from_index(3).label(), "0.3");
  EXPECT_EQ(Level::from_index(10).label(), "1.0");
  EXPECT_DOUBLE_EQ(Level::from_index(7).rate(), 0.7);
  EXPECT_TRUE(Level::from_index(0).is_baseline());
  EXPECT_LT(Level::from_index(2), Level::from_index(3));
}

TEST(Level, FromRateAcceptsOnlyGridPoints) {
  ASSERT_TRUE(Level::from_rate(0.3).has_value());
  EXPECT_EQ(Level::from_rate(0.1 + 0.2)->index(), 3);
  EXPECT_EQ(Level::from_rate(1.0)->index(), 10);
  EXPECT_FALSE(Level::from_rate(0.35).has_value());
  EXPECT_FALSE(Level::from_rate(-0.1).has_value());
  EXPECT_FALSE(Level::from_rate(1.1).has_value());
}

TEST(Enums, RoundTrip) {
  for (Method m : kAllMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_task_kind("code"), TaskKind::kCode);
  EXPECT_EQ(parse_task_kind("math"), TaskKind::kMath);
  EXPECT_FALSE(parse_method("shuffle").has_value());
  EXPECT_FALSE(parse_task_kind("prose").has_value());
}

TEST(Random, StableHashIsFixedAcrossBuilds) {
  EXPECT_EQ(stable_hash("abc"), stable_hash("abc"));
  EXPECT_NE(stable_hash("abc"), stable_hash("abd"));
  EXPECT_NE(hash_combine(1, 2), hash_combine(2, 1));
}

TEST(Random, UniformBelowStaysInRangeAndCoversIt) {
  Rng rng(5);
  std::map<std::uint64_t, int> seen;
  for (int i = 0; i < 7000; ++i) ++seen[uniform_below(rng, 7)];
  ASSERT_EQ(seen.size(), 7u);
  EXPECT_EQ(seen.rbegin()->first, 6u);
  for (const auto& [v, n] : seen) EXPECT_NEAR(n, 1000, 150) << v;
}

TEST(Random, UniformUnitInHalfOpenInterval) {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform_unit(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Random, SampleWithoutReplacementIsSortedAndDistinct) {
  Rng rng(3);
  for (std::size_t k = 0; k <= 10; ++k) {
    const auto picks = sample_without_replacement(rng, 10, k);
    ASSERT_EQ(picks.size(), k);
    EXPECT_TRUE(std::is_sorted(picks.begin(), picks.end()));
    EXPECT_EQ(std::set<std::size_t>(picks.begin(), picks.end()).size(), k);
    for (auto p : picks) EXPECT_LT(p, 10u);
  }
}

TEST(Random, SampleWithoutReplacementIsUniformOverSubsets) {
  Rng rng(17);
  std::map<std::vector<std::size_t>, int> counts;
  for (int i = 0; i < 6000; ++i) ++counts[sample_without_replacement(rng, 4, 2)];
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [subset, n] : counts) EXPECT_NEAR(n, 1000, 150);
}

TEST(Random, BinomialDrawMoments) {
  Rng rng(21);
  EXPECT_EQ(binomial_draw(rng, 50, 0.0), 0u);
  EXPECT_EQ(binomial_draw(rng, 50, 1.0), 50u);
  double sum = 0;
  for (int i = 0; i < 4000; ++i) sum += static_cast<double>(binomial_draw(rng, 40, 0.25));
  EXPECT_NEAR(sum / 4000, 10.0, 0.2);
}

}  // namespace
}  // namespace decayprobe
