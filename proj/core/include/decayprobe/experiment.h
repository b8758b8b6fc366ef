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

#ifndef DECAYPROBE_EXPERIMENT_H_
#define DECAYPROBE_EXPERIMENT_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decayprobe/analytics.h"
#include "decayprobe/config.h"
#include "decayprobe/corpus.h"
#include "decayprobe/gateway.h"
#include "decayprobe/store.h"

namespace decayprobe {

// Restricts a run or analysis to some models / one dataset.
struct RunFilter {
  std::vector<std::string> models;      // empty: all
  std::optional<std::string> dataset;   // empty: all

  bool admits_model(const std::string& name) const;
  bool admits_dataset(const std::string& label) const;
};

// Loads every configured corpus, keyed by label.
std::map<std::string, Corpus> load_corpora(const ExperimentConfig& config);

// Instantiates the configured models. Mock tiers resolve corpus labels
// against `corpora`.
std::vector<std::unique_ptr<ChatModel>> make_models(const ExperimentConfig& config,
                                                    const std::map<std::string, Corpus>& corpora);

struct RunSummary {
  std::size_t planned = 0;   // outcome keys in scope
  std::size_t reused = 0;    // already in the store
  std::size_t recorded = 0;  // newly appended
  std::size_t failed = 0;    // infrastructure errors, logged and skipped
  std::size_t model_calls = 0;
};

struct RunHooks {
  // Replaces make_models, e.g. to inject instrumented models in tests.
  std::function<std::vector<std::unique_ptr<ChatModel>>(
      const ExperimentConfig&, const std::map<std::string, Corpus>&)>
      model_factory;
  // Stops scheduling new work once it returns true.
  std::function<bool()> should_stop;
};

// For each (corpus, task, model, method, level) not yet in the store:
// obfuscate, render, query, score, append. Infrastructure failures
// (transport, auth, sandbox) go to store/errors.ndjson and leave the key
// open for the next run. Store location: <output_dir>/store.
RunSummary run_experiment(const ExperimentConfig& config, const RunFilter& filter = {},
                          const RunHooks& hooks = {});

AccuracyGrid build_grid(const std::vector<OutcomeRecord>& records);

struct DatasetAnalysis {
  std::string dataset;
  std::optional<DecayStats> stats;                 // per-model metrics, averaged
  std::map<std::string, DecayStats> per_model;
  std::optional<DecayCurve> curve;                 // pooled over models/methods
  std::map<std::string, DecayCurve> model_curves;
  std::map<Method, DecayCurve> method_curves;
  std::optional<std::string> error;                // e.g. zero baseline
};

struct Analysis {
  AccuracyGrid grid;
  std::map<std::string, DatasetAnalysis> datasets;
  std::vector<VerdictReport> verdicts;
  double confidence = 0.95;
  int n_resamples = 0;
};

// Throws InsufficientLevels when no outcome above level 0 exists, and
// std::invalid_argument for an empty store.
Analysis analyze(const ResultsStore& store, const ExperimentConfig& config,
                 const RunFilter& filter = {});

}  // namespace decayprobe

#endif  // DECAYPROBE_EXPERIMENT_H_
