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

#include "decayprobe/analytics.h"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "decayprobe/errors.h"
#include "decayprobe/random.h"

namespace decayprobe {
namespace {

constexpr double kHalf = 0.5;

// Normalized values of a curve, refusing a zero baseline.
std::vector<double> normalized_values(const DecayCurve& curve) {
  if (!(curve.baseline > 0.0)) {
    throw ZeroBaseline("baseline accuracy is zero; normalized decay is undefined");
  }
  std::vector<double> values;
  values.reserve(curve.points.size());
  for (const CurvePoint& p : curve.points) {
    values.push_back(p.normalized.value_or(p.accuracy / curve.baseline));
  }
  return values;
}

// Cells of one model, in grid order.
struct ModelCells {
  std::string model;
  std::vector<std::pair<Level, CellCounts>> cells;
};

std::vector<ModelCells> collect(const AccuracyGrid& grid, const Selection& selection) {
  std::map<std::string, std::vector<std::pair<Level, CellCounts>>> by_model;
  for (const auto& [key, counts] : grid.cells()) {
    if (selection.matches(key)) by_model[key.model].emplace_back(key.level, counts);
  }
  std::vector<ModelCells> out;
  for (auto& [model, cells] : by_model) out.push_back({model, std::move(cells)});
  return out;
}

DecayCurve pool(std::span<const std::pair<Level, CellCounts>> cells) {
  std::map<Level, CellCounts> by_level;
  for (const auto& [level, counts] : cells) {
    auto& slot = by_level[level];
    slot.successes += counts.successes;
    slot.attempts += counts.attempts;
  }
  const auto base = by_level.find(Level::from_index(0));
  if (base == by_level.end() || base->second.attempts == 0) {
    throw MissingBaseline("no level-0 attempts in the selection");
  }
  DecayCurve curve;
  curve.baseline = base->second.accuracy();
  for (const auto& [level, counts] : by_level) {
    if (counts.attempts == 0) continue;
    CurvePoint p{level, counts.accuracy(), std::nullopt};
    if (curve.baseline > 0.0) p.normalized = p.accuracy / curve.baseline;
    curve.points.push_back(p);
  }
  return curve;
}

std::array<double, 4> all_metrics(const DecayCurve& curve) {
  return {half_decay_point(curve), full_decay_point(curve), decay_gradient(curve),
          average_retention(curve)};
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  // Summation noise must not turn a constant sample into a nonzero spread.
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

// ---- grid ----

void AccuracyGrid::record(const CellKey& key, bool correct) {
  auto& cell = cells_[key];
  ++cell.attempts;
  if (correct) ++cell.successes;
}

void AccuracyGrid::add(const CellKey& key, std::uint64_t successes, std::uint64_t attempts) {
  if (successes > attempts) throw std::invalid_argument("successes exceed attempts");
  auto& cell = cells_[key];
  cell.successes += successes;
  cell.attempts += attempts;
}

std::vector<std::string> AccuracyGrid::datasets() const {
  std::set<std::string> names;
  for (const auto& [key, counts] : cells_) names.insert(key.dataset);
  return {names.begin(), names.end()};
}

std::vector<std::string> AccuracyGrid::models(std::string_view dataset) const {
  std::set<std::string> names;
  for (const auto& [key, counts] : cells_) {
    if (key.dataset == dataset) names.insert(key.model);
  }
  return {names.begin(), names.end()};
}

AccuracyGrid accumulate(std::span<const EvalOutcome> outcomes, std::string_view dataset) {
  AccuracyGrid grid;
  for (const EvalOutcome& o : outcomes) {
    grid.record({std::string(dataset), o.model, o.method, o.level}, o.correct);
  }
  return grid;
}

bool Selection::matches(const CellKey& key) const {
  if (key.dataset != dataset) return false;
  if (model && key.model != *model) return false;
  return methods.empty() || std::find(methods.begin(), methods.end(), key.method) != methods.end();
}

// ---- curves and metrics ----

DecayCurve decay_curve(const AccuracyGrid& grid, const Selection& selection) {
  std::vector<std::pair<Level, CellCounts>> cells;
  for (const auto& [key, counts] : grid.cells()) {
    if (selection.matches(key)) cells.emplace_back(key.level, counts);
  }
  return pool(cells);
}

DecayCurve make_curve(std::span<const std::pair<Level, double>> accuracies) {
  DecayCurve curve;
  if (accuracies.empty() || !accuracies.front().first.is_baseline()) {
    throw MissingBaseline("curve must start at level 0");
  }
  curve.baseline = accuracies.front().second;
  for (const auto& [level, accuracy] : accuracies) {
    CurvePoint p{level, accuracy, std::nullopt};
    if (curve.baseline > 0.0) p.normalized = accuracy / curve.baseline;
    curve.points.push_back(p);
  }
  return curve;
}

double half_decay_point(const DecayCurve& curve) {
  const auto values = normalized_values(curve);
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] <= kHalf) {
      const double x0 = curve.points[i - 1].level.rate();
      const double x1 = curve.points[i].level.rate();
      return x0 + (x1 - x0) * (values[i - 1] - kHalf) / (values[i - 1] - values[i]);
    }
  }
  return 1.0;
}

double full_decay_point(const DecayCurve& curve) {
  normalized_values(curve);
  const auto& pts = curve.points;
  if (pts.empty() || pts.back().accuracy != 0.0) return 1.0;
  std::size_t first_zero = pts.size() - 1;
  while (first_zero > 0 && pts[first_zero - 1].accuracy == 0.0) --first_zero;
  return pts[first_zero].level.rate();
}

double decay_gradient(const DecayCurve& curve) {
  const auto values = normalized_values(curve);
  if (values.size() < 2) throw InsufficientLevels("gradient needs at least two levels");
  const double n = static_cast<double>(values.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    mean_x += curve.points[i].level.rate();
    mean_y += values[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dx = curve.points[i].level.rate() - mean_x;
    sxy += dx * (values[i] - mean_y);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double average_retention(const DecayCurve& curve) {
  const auto values = normalized_values(curve);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (curve.points[i].level.is_baseline()) continue;
    sum += values[i];
    ++count;
  }
  if (count == 0) throw InsufficientLevels("no obfuscated levels to average");
  return std::max(0.0, sum / static_cast<double>(count));
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kHalfDecay: return "half_decay";
    case Metric::kFullDecay: return "full_decay";
    case Metric::kGradient: return "gradient";
    case Metric::kAverage: return "average";
  }
  return "unknown";
}

double compute_metric(const DecayCurve& curve, Metric metric) {
  switch (metric) {
    case Metric::kHalfDecay: return half_decay_point(curve);
    case Metric::kFullDecay: return full_decay_point(curve);
    case Metric::kGradient: return decay_gradient(curve);
    case Metric::kAverage: return average_retention(curve);
  }
  throw std::invalid_argument("unknown metric");
}

// ---- resampling ----

const Estimate& DecayStats::get(Metric metric) const {
  switch (metric) {
    case Metric::kHalfDecay: return half_decay;
    case Metric::kFullDecay: return full_decay;
    case Metric::kGradient: return gradient;
    case Metric::kAverage: return average;
  }
  throw std::invalid_argument("unknown metric");
}

Estimate& DecayStats::get(Metric metric) {
  return const_cast<Estimate&>(std::as_const(*this).get(metric));
}

double z_score(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
}

DecayStats compute_decay_stats(const AccuracyGrid& grid, const Selection& selection,
                               const ResampleOptions& options) {
  if (options.n_resamples < kMinResamples) {
    throw std::invalid_argument("n_resamples must be at least " + std::to_string(kMinResamples));
  }
  const double z = z_score(options.confidence);
  const auto models = collect(grid, selection);
  if (models.empty()) throw MissingBaseline("selection matches no cells");

  DecayStats stats;
  stats.confidence = options.confidence;
  stats.resamples = options.n_resamples;

  // Observed: per-model metrics, then the cross-model mean.
  std::array<double, 4> observed{};
  for (const ModelCells& m : models) {
    const auto values = all_metrics(pool(m.cells));
    for (std::size_t k = 0; k < 4; ++k) observed[k] += values[k];
  }
  for (double& v : observed) v /= static_cast<double>(models.size());

  std::array<std::vector<double>, 4> draws;
  for (auto& d : draws) d.reserve(static_cast<std::size_t>(options.n_resamples));
  std::vector<std::pair<Level, CellCounts>> redrawn;
  for (int r = 0; r < options.n_resamples; ++r) {
    Rng rng(hash_combine(options.seed, static_cast<std::uint64_t>(r)));
    std::array<double, 4> sums{};
    bool discarded = false;
    for (const ModelCells& m : models) {
      redrawn.clear();
      for (const auto& [level, counts] : m.cells) {
        const std::uint64_t s = binomial_draw(rng, counts.attempts, counts.accuracy());
        redrawn.push_back({level, {s, counts.attempts}});
      }
      const DecayCurve curve = pool(redrawn);
      if (!(curve.baseline > 0.0)) {
        discarded = true;
        break;
      }
      const auto values = all_metrics(curve);
      for (std::size_t k = 0; k < 4; ++k) sums[k] += values[k];
    }
    if (discarded) {
      ++stats.discarded;
      continue;
    }
    for (std::size_t k = 0; k < 4; ++k) {
      draws[k].push_back(sums[k] / static_cast<double>(models.size()));
    }
  }
  if (2 * stats.discarded > options.n_resamples) {
    throw ZeroBaseline(std::to_string(stats.discarded) + " of " +
                       std::to_string(options.n_resamples) +
                       " resamples hit a zero baseline");
  }
  for (std::size_t k = 0; k < 4; ++k) {
    stats.get(kAllMetrics[k]) = {observed[k], z * sample_sd(draws[k])};
  }
  return stats;
}

Estimate resample_ci(const AccuracyGrid& grid, const Selection& selection, Metric metric,
                     const ResampleOptions& options) {
  return compute_decay_stats(grid, selection, options).get(metric);
}

// ---- verdict ----

std::string_view to_string(VerdictFlag flag) {
  switch (flag) {
    case VerdictFlag::kContaminationSuspected: return "CONTAMINATION_SUSPECTED";
    case VerdictFlag::kInconclusive: return "INCONCLUSIVE";
    case VerdictFlag::kNoSignal: return "NO_SIGNAL";
  }
  return "NO_SIGNAL";
}

VerdictReport contamination_verdict(const DecayStats& a, const DecayStats& b,
                                    std::string label_a, std::string label_b) {
  if (std::abs(a.confidence - b.confidence) > 1e-12) {
    throw std::invalid_argument("decay stats were computed at different confidence levels");
  }
  VerdictReport report;
  report.label_a = std::move(label_a);
  report.label_b = std::move(label_b);
  for (Metric m : kAllMetrics) {
    const Estimate& ea = a.get(m);
    const Estimate& eb = b.get(m);
    MetricComparison c;
    c.metric = m;
    c.a = ea.point;
    c.b = eb.point;
    c.difference = ea.point - eb.point;
    c.disjoint = std::abs(c.difference) > ea.half_width + eb.half_width;
    report.comparisons.push_back(c);
  }
  const MetricComparison& half = report.comparisons[0];
  const MetricComparison& grad = report.comparisons[2];
  const bool both_disjoint = half.disjoint && grad.disjoint;
  if (both_disjoint && half.difference > 0 && grad.difference > 0) {
    report.flag = VerdictFlag::kContaminationSuspected;
    report.suspected = report.label_a;
  } else if (both_disjoint && half.difference < 0 && grad.difference < 0) {
    report.flag = VerdictFlag::kContaminationSuspected;
    report.suspected = report.label_b;
  } else if (half.difference != 0.0 || grad.difference != 0.0) {
    report.flag = VerdictFlag::kInconclusive;
  } else {
    report.flag = VerdictFlag::kNoSignal;
  }
  return report;
}

}  // namespace decayprobe
