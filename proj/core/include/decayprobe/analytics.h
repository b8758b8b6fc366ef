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

#ifndef DECAYPROBE_ANALYTICS_H_
#define DECAYPROBE_ANALYTICS_H_

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decayprobe/evaluator.h"
#include "decayprobe/types.h"

namespace decayprobe {

struct CellKey {
  std::string dataset;
  std::string model;
  Method method = Method::kTruncation;
  Level level;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellCounts {
  std::uint64_t successes = 0;
  std::uint64_t attempts = 0;

  double accuracy() const {
    return attempts == 0 ? 0.0 : static_cast<double>(successes) / attempts;
  }
  friend bool operator==(const CellCounts&, const CellCounts&) = default;
};

class AccuracyGrid {
 public:
  using Cells = std::map<CellKey, CellCounts>;

  void record(const CellKey& key, bool correct);
  // Throws std::invalid_argument when successes > attempts.
  void add(const CellKey& key, std::uint64_t successes, std::uint64_t attempts);

  const Cells& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }

  std::vector<std::string> datasets() const;
  std::vector<std::string> models(std::string_view dataset) const;

  friend bool operator==(const AccuracyGrid&, const AccuracyGrid&) = default;

 private:
  Cells cells_;
};

AccuracyGrid accumulate(std::span<const EvalOutcome> outcomes, std::string_view dataset);

// Which cells feed a curve. No model means all models; no methods means
// all methods.
struct Selection {
  std::string dataset;
  std::optional<std::string> model;
  std::vector<Method> methods;

  bool matches(const CellKey& key) const;
};

struct CurvePoint {
  Level level;
  double accuracy = 0.0;
  std::optional<double> normalized;  // accuracy / baseline, if baseline > 0
};

struct DecayCurve {
  double baseline = 0.0;
  std::vector<CurvePoint> points;  // ascending levels, level 0 first
};

// Pools successes and attempts of the selected cells per level. Throws
// MissingBaseline when level 0 has no attempts. A zero baseline yields a
// curve without normalized values; every metric below refuses it with
// ZeroBaseline.
DecayCurve decay_curve(const AccuracyGrid& grid, const Selection& selection);

// Builds a curve straight from (level, accuracy) pairs; level 0 first.
DecayCurve make_curve(std::span<const std::pair<Level, double>> accuracies);

// First level whose normalized accuracy is <= 0.5, linearly interpolated
// against the previous level; 1.0 if never reached.
double half_decay_point(const DecayCurve& curve);
// First level from which accuracy is exactly zero through the last level;
// 1.0 if the last level is still non-zero.
double full_decay_point(const DecayCurve& curve);
// Least-squares slope of normalized accuracy against rate.
double decay_gradient(const DecayCurve& curve);
// Mean normalized accuracy over the non-zero levels, floored at 0.
double average_retention(const DecayCurve& curve);

enum class Metric { kHalfDecay, kFullDecay, kGradient, kAverage };
inline constexpr std::array<Metric, 4> kAllMetrics = {
    Metric::kHalfDecay, Metric::kFullDecay, Metric::kGradient, Metric::kAverage};
std::string_view to_string(Metric metric);
double compute_metric(const DecayCurve& curve, Metric metric);

struct Estimate {
  double point = 0.0;
  double half_width = 0.0;
};

struct DecayStats {
  Estimate half_decay;
  Estimate full_decay;
  Estimate gradient;
  Estimate average;
  double confidence = 0.95;
  int resamples = 0;
  int discarded = 0;

  const Estimate& get(Metric metric) const;
  Estimate& get(Metric metric);
};

struct ResampleOptions {
  int n_resamples = 1000;
  double confidence = 0.95;
  std::uint64_t seed = 0;
};

inline constexpr int kMinResamples = 100;

// Two-sided normal quantile, e.g. 1.959964 for 0.95.
double z_score(double confidence);

// Metric computed per model over the selection and averaged across models.
// Point is the observed value; half-width is z * sd of the same quantity
// under parametric resampling, where each selected cell's successes are
// redrawn from Binomial(attempts, successes / attempts). Resamples in which
// some model's baseline drops to zero are discarded; more than half
// discarded throws ZeroBaseline. Throws std::invalid_argument below
// kMinResamples.
Estimate resample_ci(const AccuracyGrid& grid, const Selection& selection, Metric metric,
                     const ResampleOptions& options);

// All four metrics from one shared set of resamples.
DecayStats compute_decay_stats(const AccuracyGrid& grid, const Selection& selection,
                               const ResampleOptions& options);

enum class VerdictFlag { kContaminationSuspected, kInconclusive, kNoSignal };
std::string_view to_string(VerdictFlag flag);

struct MetricComparison {
  Metric metric = Metric::kHalfDecay;
  double a = 0.0;
  double b = 0.0;
  double difference = 0.0;  // a - b
  bool disjoint = false;
};

struct VerdictReport {
  std::string label_a;
  std::string label_b;
  std::vector<MetricComparison> comparisons;
  VerdictFlag flag = VerdictFlag::kNoSignal;
  std::optional<std::string> suspected;  // label flagged as contaminated
};

// A dataset is suspected when its 50% decay point is later than the
// other's and its gradient shallower, both with disjoint intervals.
// Either direction may be flagged. Otherwise INCONCLUSIVE if either key
// metric differs at all, NO_SIGNAL if both are identical. Throws
// std::invalid_argument when confidences differ.
VerdictReport contamination_verdict(const DecayStats& a, const DecayStats& b,
                                    std::string label_a, std::string label_b);

}  // namespace decayprobe

#endif  // DECAYPROBE_ANALYTICS_H_
