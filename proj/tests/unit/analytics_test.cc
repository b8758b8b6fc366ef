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

#include <cmath>

#include "decayprobe/analytics.h"
#include "decayprobe/errors.h"

namespace decayprobe {
namespace {

DecayCurve curve_of(const std::vector<double>& accuracy) {
  std::vector<std::pair<Level, double>> acc;
  for (std::size_t i = 0; i < accuracy.size(); ++i) {
    acc.emplace_back(Level::from_index(static_cast<int>(i)), accuracy[i]);
  }
  return make_curve(acc);
}

DecayCurve linear() {
  std::vector<double> a;
  for (int i = 0; i <= 10; ++i) a.push_back(1.0 - i / 10.0);
  return curve_of(a);
}

DecayCurve constant() { return curve_of(std::vector<double>(11, 1.0)); }

TEST(Accumulate, CountsPerCell) {
  std::vector<EvalOutcome> outcomes(3);
  for (auto& o : outcomes) {
    o.model = "m";
    o.level = Level::from_index(2);
  }
  outcomes[0].correct = outcomes[2].correct = true;
  const AccuracyGrid g = accumulate(outcomes, "d");
  ASSERT_EQ(g.cells().size(), 1u);
  EXPECT_EQ(g.cells().begin()->second, (CellCounts{2, 3}));
  EXPECT_TRUE(accumulate({}, "d").empty());
}

TEST(Accumulate, TwentyTasksThreeMethods) {
  std::vector<EvalOutcome> outcomes;
  for (int t = 0; t < 20; ++t) {
    for (Method m : kAllMethods) {
      EvalOutcome o;
      o.task_id = std::to_string(t);
      o.model = "m";
      o.method = m;
      o.level = Level::from_index(4);
      outcomes.push_back(o);
    }
  }
  std::uint64_t attempts = 0;
  const AccuracyGrid grid = accumulate(outcomes, "d");
  EXPECT_EQ(grid.cells().size(), 3u);
  for (const auto& [key, counts] : grid.cells()) attempts += counts.attempts;
  EXPECT_EQ(attempts, 60u);
}

TEST(AccuracyGrid, RejectsImpossibleCounts) {
  AccuracyGrid g;
  EXPECT_THROW(g.add({"d", "m", Method::kTypos, Level::from_index(0)}, 3, 2), std::invalid_argument);
}

TEST(DecayCurve, NormalizesAgainstBaseline) {
  AccuracyGrid g;
  g.add({"d", "m", Method::kTruncation, Level::from_index(0)}, 1, 1);
  g.add({"d", "m", Method::kTruncation, Level::from_index(5)}, 1, 2);
  g.add({"d", "m", Method::kTruncation, Level::from_index(10)}, 0, 1);
  const DecayCurve c = decay_curve(g, {"d", std::nullopt, {}});
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_DOUBLE_EQ(*c.points[0].normalized, 1.0);
  EXPECT_DOUBLE_EQ(*c.points[1].normalized, 0.5);
  EXPECT_DOUBLE_EQ(*c.points[2].normalized, 0.0);
}

TEST(DecayCurve, PoolsAcrossMethods) {
  AccuracyGrid g;
  g.add({"d", "m", Method::kTruncation, Level::from_index(0)}, 10, 10);
  g.add({"d", "m", Method::kTruncation, Level::from_index(3)}, 3, 10);
  g.add({"d", "m", Method::kTypos, Level::from_index(3)}, 1, 10);
  const DecayCurve c = decay_curve(g, {"d", std::nullopt, {}});
  EXPECT_DOUBLE_EQ(c.points[1].accuracy, 0.2);
}

TEST(DecayCurve, BaselineErrors) {
  AccuracyGrid g;
  g.add({"d", "m", Method::kTruncation, Level::from_index(0)}, 0, 0);
  g.add({"d", "m", Method::kTruncation, Level::from_index(1)}, 1, 2);
  EXPECT_THROW(decay_curve(g, {"d", std::nullopt, {}}), MissingBaseline);
  EXPECT_THROW(decay_curve(g, {"other", std::nullopt, {}}), MissingBaseline);
  AccuracyGrid z;
  z.add({"d", "m", Method::kTruncation, Level::from_index(0)}, 0, 5);
  z.add({"d", "m", Method::kTruncation, Level::from_index(1)}, 0, 5);
  const DecayCurve c = decay_curve(z, {"d", std::nullopt, {}});
  EXPECT_FALSE(c.points[0].normalized.has_value());
  EXPECT_THROW(half_decay_point(c), ZeroBaseline);
  EXPECT_THROW(decay_gradient(c), ZeroBaseline);
}

TEST(HalfDecay, Examples) {
  EXPECT_NEAR(half_decay_point(linear()), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(half_decay_point(constant()), 1.0);
  // normalized 1.0 at 0.3 then 0.2 at 0.4: 0.3 + 0.1 * (0.5 / 0.8)
  const DecayCurve c = curve_of({1, 1, 1, 1, 0.2, 0.1, 0, 0, 0, 0, 0});
  EXPECT_NEAR(half_decay_point(c), 0.3625, 1e-12);
}

TEST(FullDecay, Examples) {
  EXPECT_DOUBLE_EQ(full_decay_point(curve_of({1, 1, 1, 1, 1, 1, 0.5, 0, 0, 0, 0})), 0.7);
  EXPECT_DOUBLE_EQ(full_decay_point(curve_of({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0.1})), 1.0);
  EXPECT_DOUBLE_EQ(full_decay_point(curve_of({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})), 0.1);
  // A zero that does not last is not full decay.
  EXPECT_DOUBLE_EQ(full_decay_point(curve_of({1, 0, 0.5, 0, 0, 0, 0, 0, 0, 0, 0})), 0.3);
}

TEST(Gradient, Examples) {
  EXPECT_NEAR(decay_gradient(linear()), -1.0, 1e-12);
  EXPECT_NEAR(decay_gradient(constant()), 0.0, 1e-12);
  // x = (0, .1, .2, .3), y = (1, 1, .5, 0): x̄ = .15, ȳ = .625,
  // Σdxdy = (-.15)(.375) + (-.05)(.375) + (.05)(-.125) + (.15)(-.625) = -.175,
  // Σdx² = .0225 + .0025 + .0025 + .0225 = .05, slope = -3.5.
  EXPECT_NEAR(decay_gradient(curve_of({1, 1, 0.5, 0})), -3.5, 1e-12);
  EXPECT_THROW(decay_gradient(curve_of({1})), InsufficientLevels);
}

TEST(Average, Examples) {
  EXPECT_NEAR(average_retention(linear()), 0.45, 1e-12);
  EXPECT_DOUBLE_EQ(average_retention(constant()), 1.0);
  EXPECT_NEAR(average_retention(curve_of({0.5, 0.6, 0.5})), 1.1, 1e-12);
}

TEST(Metrics, InvariantUnderMethodRelabeling) {
  AccuracyGrid a, b;
  const int s[11] = {9, 8, 8, 7, 5, 4, 3, 2, 1, 0, 0};
  for (int i = 0; i < 11; ++i) {
    a.add({"d", "m", Method::kTruncation, Level::from_index(i)}, static_cast<std::uint64_t>(s[i]), 10);
    a.add({"d", "m", Method::kTypos, Level::from_index(i)}, static_cast<std::uint64_t>(s[10 - i] / 2), 10);
    b.add({"d", "m", Method::kDeletion, Level::from_index(i)}, static_cast<std::uint64_t>(s[i]), 10);
    b.add({"d", "m", Method::kTruncation, Level::from_index(i)}, static_cast<std::uint64_t>(s[10 - i] / 2), 10);
  }
  const Selection sel{"d", std::nullopt, {}};
  const auto sa = compute_decay_stats(a, sel, {200, 0.95, 4});
  const auto sb = compute_decay_stats(b, sel, {200, 0.95, 4});
  for (Metric m : kAllMetrics) EXPECT_DOUBLE_EQ(sa.get(m).point, sb.get(m).point);
}

AccuracyGrid two_model_grid(std::uint64_t attempts) {
  AccuracyGrid g;
  for (int i = 0; i < 11; ++i) {
    const auto s = static_cast<std::uint64_t>(std::llround((1.0 - i / 12.0) * static_cast<double>(attempts)));
    g.add({"d", "m1", Method::kTruncation, Level::from_index(i)}, s, attempts);
    g.add({"d", "m2", Method::kTruncation, Level::from_index(i)}, s / 2, attempts);
  }
  return g;
}

TEST(ResampleCi, DeterministicGridHasZeroWidth) {
  AccuracyGrid g;
  for (int i = 0; i < 11; ++i) g.add({"d", "m", Method::kTypos, Level::from_index(i)}, i < 6 ? 20 : 0, 20);
  const Estimate e = resample_ci(g, {"d", std::nullopt, {}}, Metric::kHalfDecay, {1000, 0.95, 1});
  EXPECT_EQ(e.half_width, 0.0);
}

TEST(ResampleCi, BelowFloorIsRejected) {
  EXPECT_THROW(resample_ci(two_model_grid(10), {"d", std::nullopt, {}}, Metric::kAverage, {99, 0.95, 1}),
               std::invalid_argument);
}

TEST(ResampleCi, PerModelThenMean) {
  const AccuracyGrid g = two_model_grid(40);
  const Selection all{"d", std::nullopt, {}};
  const auto stats = compute_decay_stats(g, all, {200, 0.95, 1});
  const auto m1 = compute_decay_stats(g, {"d", "m1", {}}, {200, 0.95, 1});
  const auto m2 = compute_decay_stats(g, {"d", "m2", {}}, {200, 0.95, 1});
  for (Metric m : kAllMetrics) {
    EXPECT_NEAR(stats.get(m).point, 0.5 * (m1.get(m).point + m2.get(m).point), 1e-12);
  }
}

TEST(ResampleCi, SeededAndStable) {
  const AccuracyGrid g = two_model_grid(30);
  const Selection sel{"d", std::nullopt, {}};
  const auto a = resample_ci(g, sel, Metric::kGradient, {1000, 0.95, 7});
  EXPECT_EQ(a.half_width, resample_ci(g, sel, Metric::kGradient, {1000, 0.95, 7}).half_width);
  const auto big1 = resample_ci(g, sel, Metric::kGradient, {10000, 0.95, 1});
  const auto big2 = resample_ci(g, sel, Metric::kGradient, {10000, 0.95, 2});
  EXPECT_LT(std::abs(big1.half_width - big2.half_width) / big1.half_width, 0.05);
}

TEST(ResampleCi, HigherConfidenceWidens) {
  const AccuracyGrid g = two_model_grid(30);
  const Selection sel{"d", std::nullopt, {}};
  EXPECT_GT(resample_ci(g, sel, Metric::kAverage, {500, 0.99, 3}).half_width,
            resample_ci(g, sel, Metric::kAverage, {500, 0.90, 3}).half_width);
  EXPECT_NEAR(z_score(0.95), 1.959963984540054, 1e-12);
}

TEST(ResampleCi, MostlyZeroBaselinesThrow) {
  // Each model's baseline redraws to zero about e^-1 of the time; with
  // three models most resamples lose at least one baseline.
  AccuracyGrid g;
  for (const char* m : {"m1", "m2", "m3"}) {
    g.add({"d", m, Method::kTypos, Level::from_index(0)}, 1, 20);
    g.add({"d", m, Method::kTypos, Level::from_index(1)}, 1, 20);
  }
  EXPECT_THROW(compute_decay_stats(g, {"d", std::nullopt, {}}, {200, 0.95, 1}), ZeroBaseline);
}

DecayStats stats(double half, double half_w, double grad, double grad_w) {
  DecayStats s;
  s.half_decay = {half, half_w};
  s.gradient = {grad, grad_w};
  s.full_decay = {0.8, 0.05};
  s.average = {0.6, 0.05};
  return s;
}

TEST(Verdict, TableOneContrast) {
  const auto r = contamination_verdict(stats(0.70, 0.08, -0.98, 0.05), stats(0.29, 0.06, -1.42, 0.14),
                                       "OldLC", "NewLC");
  EXPECT_EQ(r.flag, VerdictFlag::kContaminationSuspected);
  EXPECT_EQ(r.suspected, "OldLC");
  ASSERT_EQ(r.comparisons.size(), 4u);
  EXPECT_TRUE(r.comparisons[0].disjoint);
  EXPECT_NEAR(r.comparisons[0].difference, 0.41, 1e-12);
}

TEST(Verdict, AntisymmetricUnderSwap) {
  const auto r = contamination_verdict(stats(0.29, 0.06, -1.42, 0.14), stats(0.70, 0.08, -0.98, 0.05),
                                       "NewLC", "OldLC");
  EXPECT_EQ(r.flag, VerdictFlag::kContaminationSuspected);
  EXPECT_EQ(r.suspected, "OldLC");
}

TEST(Verdict, IdenticalStatsNoSignal) {
  const auto s = stats(0.5, 0.1, -1.0, 0.1);
  EXPECT_EQ(contamination_verdict(s, s, "a", "b").flag, VerdictFlag::kNoSignal);
}

TEST(Verdict, OverlapIsInconclusive) {
  EXPECT_EQ(contamination_verdict(stats(0.50, 0.10, -0.9, 0.05), stats(0.40, 0.10, -1.5, 0.05), "a", "b").flag,
            VerdictFlag::kInconclusive);
  // Disjoint on both but pointing different ways.
  EXPECT_EQ(contamination_verdict(stats(0.70, 0.01, -1.5, 0.01), stats(0.30, 0.01, -0.9, 0.01), "a", "b").flag,
            VerdictFlag::kInconclusive);
}

TEST(Verdict, ConfidenceMismatchRejected) {
  DecayStats a = stats(0.5, 0.1, -1, 0.1), b = a;
  b.confidence = 0.9;
  EXPECT_THROW(contamination_verdict(a, b, "a", "b"), std::invalid_argument);
}

}  // namespace
}  // namespace decayprobe
