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

#include "decayprobe/report.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "decayprobe/errors.h"
#include "nlohmann/json.hpp"

namespace decayprobe {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string fixed(double value, int digits) {
  if (value == 0.0) value = 0.0;  // no "-0.00"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  std::string out = buf;
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string_view metric_title(Metric metric) {
  switch (metric) {
    case Metric::kHalfDecay: return "50% decay";
    case Metric::kFullDecay: return "100% decay";
    case Metric::kGradient: return "Gradient";
    case Metric::kAverage: return "Average";
  }
  return "";
}

Json estimate_json(const Estimate& e) { return Json{{"point", e.point}, {"half_width", e.half_width}}; }

Json stats_to_json(const DecayStats& stats) {
  Json doc = Json::object();
  for (Metric m : kAllMetrics) doc[std::string(to_string(m))] = estimate_json(stats.get(m));
  doc["resamples"] = stats.resamples;
  doc["discarded"] = stats.discarded;
  return doc;
}

Json curve_to_json(const DecayCurve& curve) {
  Json points = Json::array();
  for (const CurvePoint& p : curve.points) {
    Json point{{"level", p.level.label()}, {"accuracy", p.accuracy}};
    point["normalized"] = p.normalized ? Json(*p.normalized) : Json(nullptr);
    points.push_back(std::move(point));
  }
  return Json{{"baseline", curve.baseline}, {"points", std::move(points)}};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

std::string file_stem_for(const std::string& dataset) {
  std::string out;
  for (char c : dataset) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out.empty() ? "dataset" : out;
}

// Colour-blind friendly palette, cycled.
constexpr std::array<std::string_view, 8> kPalette = {"#0072B2", "#D55E00", "#009E73", "#CC79A7",
                                                      "#E69F00", "#56B4E9", "#F0E442", "#000000"};

}  // namespace

std::string results_csv(const AccuracyGrid& grid) {
  std::string out = "dataset,model,method,level,successes,attempts,accuracy\n";
  for (const auto& [key, counts] : grid.cells()) {
    out += csv_field(key.dataset) + ',' + csv_field(key.model) + ',' +
           std::string(to_string(key.method)) + ',' + key.level.label() + ',' +
           std::to_string(counts.successes) + ',' + std::to_string(counts.attempts) + ',' +
           fixed(counts.accuracy(), 6) + '\n';
  }
  return out;
}

std::string stats_json(const Analysis& analysis) {
  Json doc;
  doc["confidence"] = analysis.confidence;
  doc["n_resamples"] = analysis.n_resamples;
  Json datasets = Json::object();
  for (const auto& [name, da] : analysis.datasets) {
    Json entry = Json::object();
    entry["error"] = da.error ? Json(*da.error) : Json(nullptr);
    entry["stats"] = da.stats ? stats_to_json(*da.stats) : Json(nullptr);
    Json per_model = Json::object();
    for (const auto& [model, stats] : da.per_model) per_model[model] = stats_to_json(stats);
    entry["per_model"] = std::move(per_model);
    entry["curve"] = da.curve ? curve_to_json(*da.curve) : Json(nullptr);
    Json models = Json::object();
    for (const auto& [model, curve] : da.model_curves) models[model] = curve_to_json(curve);
    entry["model_curves"] = std::move(models);
    Json methods = Json::object();
    for (const auto& [method, curve] : da.method_curves) {
      methods[std::string(to_string(method))] = curve_to_json(curve);
    }
    entry["method_curves"] = std::move(methods);
    datasets[name] = std::move(entry);
  }
  doc["datasets"] = std::move(datasets);
  Json verdicts = Json::array();
  for (const VerdictReport& v : analysis.verdicts) {
    Json comparisons = Json::array();
    for (const MetricComparison& c : v.comparisons) {
      comparisons.push_back({{"metric", to_string(c.metric)},
                             {"a", c.a},
                             {"b", c.b},
                             {"difference", c.difference},
                             {"disjoint", c.disjoint}});
    }
    verdicts.push_back({{"a", v.label_a},
                        {"b", v.label_b},
                        {"flag", to_string(v.flag)},
                        {"suspected", v.suspected ? Json(*v.suspected) : Json(nullptr)},
                        {"comparisons", std::move(comparisons)}});
  }
  doc["verdicts"] = std::move(verdicts);
  return doc.dump(2) + '\n';
}

std::string decay_table_csv(const Analysis& analysis) {
  std::string out = "metric";
  for (const auto& [name, da] : analysis.datasets) out += ',' + csv_field(name);
  out += '\n';
  for (Metric m : kAllMetrics) {
    out += metric_title(m);
    for (const auto& [name, da] : analysis.datasets) {
      out += ',';
      if (!da.stats) {
        out += "n/a";
        continue;
      }
      const Estimate& e = da.stats->get(m);
      out += fixed(e.point, 2) + " \xC2\xB1 " + fixed(e.half_width, 2);
    }
    out += '\n';
  }
  return out;
}

std::string render_decay_chart(const DatasetAnalysis& dataset,
                               const std::vector<BaselineCurve>& overlays) {
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 60, kRight = 170, kTop = 40, kBottom = 50;
  constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;
  const auto px = [&](double rate) { return fixed(kLeft + rate * kPlotW, 2); };
  const auto py = [&](double value) {
    return fixed(kTop + (1.0 - std::clamp(value, 0.0, 1.0)) * kPlotH, 2);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(dataset.dataset) << "</text>\n";

  // Axes and grid.
  for (int i = 0; i <= 10; ++i) {
    const double v = i / 10.0;
    svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(v) << "\" x2=\"" << px(1) << "\" y2=\"" << py(v)
        << "\" stroke=\"#e5e5e5\"/>\n";
    if (i % 2 == 0) {
      svg << "<text x=\"" << fixed(kLeft - 8, 2) << "\" y=\"" << py(v)
          << "\" text-anchor=\"end\" dominant-baseline=\"middle\">" << fixed(v, 1) << "</text>\n";
      svg << "<text x=\"" << px(v) << "\" y=\"" << fixed(kTop + kPlotH + 18, 2)
          << "\" text-anchor=\"middle\">" << fixed(v, 1) << "</text>\n";
    }
  }
  svg << "<rect x=\"" << px(0) << "\" y=\"" << py(1) << "\" width=\"" << fixed(kPlotW, 2)
      << "\" height=\"" << fixed(kPlotH, 2) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fixed(kLeft + kPlotW / 2, 2) << "\" y=\"" << fixed(kHeight - 12, 2)
      << "\" text-anchor=\"middle\">obfuscation level</text>\n";
  svg << "<text transform=\"translate(16 " << fixed(kTop + kPlotH / 2, 2)
      << ") rotate(-90)\" text-anchor=\"middle\">normalized accuracy</text>\n";

  std::size_t series = 0;
  const auto legend = [&](std::string_view label, std::string_view colour, bool dashed) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(series);
    const double x = kLeft + kPlotW + 14;
    svg << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << fixed(y, 2) << "\" x2=\"" << fixed(x + 22, 2)
        << "\" y2=\"" << fixed(y, 2) << "\" stroke=\"" << colour << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    svg << "<text x=\"" << fixed(x + 28, 2) << "\" y=\"" << fixed(y, 2)
        << "\" dominant-baseline=\"middle\">" << xml_escape(label) << "</text>\n";
  };

  for (const auto& [model, curve] : dataset.model_curves) {
    const std::string_view colour = kPalette[series % kPalette.size()];
    std::string points;
    for (const CurvePoint& p : curve.points) {
      if (!points.empty()) points += ' ';
      points += px(p.level.rate()) + ',' + py(p.normalized.value_or(p.accuracy));
    }
    svg << "<g class=\"series model\" data-label=\"" << xml_escape(model) << "\">\n";
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"" << points
        << "\"/>\n";
    for (const CurvePoint& p : curve.points) {
      svg << "<circle cx=\"" << px(p.level.rate()) << "\" cy=\"" << py(p.normalized.value_or(p.accuracy))
          << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
    }
    svg << "</g>\n";
    legend(model, colour, false);
    ++series;
  }
  for (const BaselineCurve& overlay : overlays) {
    const std::string_view colour = kPalette[series % kPalette.size()];
    std::string points;
    for (const auto& [rate, value] : overlay.points) {
      if (!points.empty()) points += ' ';
      points += px(rate) + ',' + py(value);
    }
    svg << "<g class=\"series baseline\" data-label=\"" << xml_escape(overlay.label) << "\">\n";
    svg << "<polyline fill=\"none\" stroke=\"" << colour
        << "\" stroke-width=\"2\" stroke-dasharray=\"6 4\" points=\"" << points << "\"/>\n";
    svg << "</g>\n";
    legend(overlay.label, colour, true);
    ++series;
  }
  if (dataset.error) {
    svg << "<text x=\"" << fixed(kLeft + kPlotW / 2, 2) << "\" y=\"" << fixed(kTop + kPlotH / 2, 2)
        << "\" text-anchor=\"middle\" fill=\"#a00\">" << xml_escape(*dataset.error) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

ReportFiles emit_report(const Analysis& analysis,
                        const std::vector<std::pair<std::string, BaselineCurve>>& baselines,
                        const fs::path& output_dir) {
  const bool any_stats = std::any_of(analysis.datasets.begin(), analysis.datasets.end(),
                                     [](const auto& d) { return d.second.stats.has_value(); });
  if (analysis.grid.empty() || !any_stats) {
    throw std::invalid_argument("nothing to report: the analysis holds no results");
  }
  ReportFiles files{output_dir / "results.csv", output_dir / "stats.json", output_dir / "table1.csv",
                    {}};
  std::error_code ec;
  fs::create_directories(output_dir / "curves", ec);
  if (ec) throw IoError("cannot create " + (output_dir / "curves").string() + ": " + ec.message());

  write_file(files.results_csv, results_csv(analysis.grid));
  write_file(files.stats_json, stats_json(analysis));
  write_file(files.table_csv, decay_table_csv(analysis));
  for (const auto& [name, da] : analysis.datasets) {
    std::vector<BaselineCurve> overlays;
    for (const auto& [dataset, curve] : baselines) {
      if (dataset == name) overlays.push_back(curve);
    }
    const fs::path chart = output_dir / "curves" / (file_stem_for(name) + ".svg");
    write_file(chart, render_decay_chart(da, overlays));
    files.charts.push_back(chart);
  }
  return files;
}

}  // namespace decayprobe
