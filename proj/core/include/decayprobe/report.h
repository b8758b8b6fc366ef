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

#ifndef DECAYPROBE_REPORT_H_
#define DECAYPROBE_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "decayprobe/corpus.h"
#include "decayprobe/experiment.h"

namespace decayprobe {

// One row per grid cell:
// dataset,model,method,level,successes,attempts,accuracy
std::string results_csv(const AccuracyGrid& grid);

std::string stats_json(const Analysis& analysis);

// Rows are metrics, columns datasets, cells "0.70 ± 0.08".
std::string decay_table_csv(const Analysis& analysis);

// Line chart of accuracy against augmentation rate: one series per model,
// the pooled mean, and any baseline overlays.
std::string render_decay_chart(const DatasetAnalysis& dataset,
                               const std::vector<BaselineCurve>& overlays);

struct ReportFiles {
  std::filesystem::path results_csv;
  std::filesystem::path stats_json;
  std::filesystem::path table_csv;
  std::vector<std::filesystem::path> charts;
};

// Writes results.csv, stats.json, table1.csv and curves/<dataset>.svg under
// `output_dir`. Throws std::invalid_argument, writing nothing, when there
// are no dataset statistics; IoError on filesystem failures.
ReportFiles emit_report(const Analysis& analysis,
                        const std::vector<std::pair<std::string, BaselineCurve>>& baselines,
                        const std::filesystem::path& output_dir);

}  // namespace decayprobe

#endif  // DECAYPROBE_REPORT_H_
