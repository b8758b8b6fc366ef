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

#include "decayprobe/experiment.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "decayprobe/errors.h"
#include "decayprobe/evaluator.h"
#include "decayprobe/memorizer.h"
#include "decayprobe/obfuscator.h"
#include "decayprobe/random.h"
#include "nlohmann/json.hpp"

namespace decayprobe {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct WorkUnit {
  const std::string* dataset;
  const Task* task;
  ChatModel* model;
};

// Infrastructure failures, one JSON line each, next to the outcome log.
class ErrorLog {
 public:
  explicit ErrorLog(const fs::path& path) : out_(path, std::ios::binary | std::ios::app) {}

  void write(const WorkUnit& unit, Method method, Level level, const std::exception& e) {
    nlohmann::json doc{{"dataset", *unit.dataset},
                       {"task_id", unit.task->id},
                       {"model", unit.model->name()},
                       {"method", to_string(method)},
                       {"level", level.label()},
                       {"error", e.what()}};
    std::lock_guard lock(mutex_);
    out_ << doc.dump() << '\n';
    out_.flush();
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

std::uint64_t resample_seed(std::uint64_t master, std::string_view dataset,
                            std::string_view model) {
  return hash_combine(master, stable_hash("resample/" + std::string(dataset) + "/" +
                                          std::string(model)));
}

}  // namespace

bool RunFilter::admits_model(const std::string& name) const {
  return models.empty() || std::find(models.begin(), models.end(), name) != models.end();
}

bool RunFilter::admits_dataset(const std::string& label) const {
  return !dataset || *dataset == label;
}

std::map<std::string, Corpus> load_corpora(const ExperimentConfig& config) {
  std::map<std::string, Corpus> corpora;
  for (const CorpusSource& src : config.corpora) {
    Corpus corpus = load_corpus(src.path, src.label);
    corpus.cutoff_note = src.cutoff_note;
    corpora.emplace(src.label, std::move(corpus));
  }
  return corpora;
}

std::vector<std::unique_ptr<ChatModel>> make_models(const ExperimentConfig& config,
                                                    const std::map<std::string, Corpus>& corpora) {
  std::vector<std::unique_ptr<ChatModel>> models;
  for (const ModelSpec& spec : config.models) {
    if (spec.remote) {
      ModelRef ref = *spec.remote;
      ref.max_reprompts = spec.max_reprompts;
      models.push_back(std::make_unique<HttpChatModel>(std::move(ref)));
      continue;
    }
    if (!spec.mock) throw ConfigError("model " + spec.name + " has neither endpoint nor mock");
    std::vector<MemorizerMemory> tiers;
    for (const MemoryTierSpec& tier : spec.mock->tiers) {
      const auto it = corpora.find(tier.corpus);
      const Corpus source = it != corpora.end() ? it->second : load_corpus(tier.corpus);
      tiers.push_back(memory_from_corpus(source, spec.mock->ngram_size, tier.threshold));
    }
    models.push_back(
        std::make_unique<MemorizingModel>(spec.name, std::move(tiers), spec.max_reprompts));
  }
  return models;
}

RunSummary run_experiment(const ExperimentConfig& config, const RunFilter& filter,
                          const RunHooks& hooks) {
  if (const auto problems = validate_config(config); !problems.empty()) {
    std::string message = "invalid config:";
    for (const auto& p : problems) message += "\n  " + p;
    throw ConfigError(message);
  }
  const auto corpora = load_corpora(config);
  auto models = hooks.model_factory ? hooks.model_factory(config, corpora)
                                    : make_models(config, corpora);

  ResultsStore store = ResultsStore::open(config.output_dir / "store", manifest_json(config));
  ResponseCache cache(config.effective_cache_dir());
  ErrorLog errors(config.output_dir / "store" / "errors.ndjson");

  std::optional<SandboxRunner> runner;
  if (!config.sandbox_command.empty()) runner.emplace(config.sandbox_command, config.limits);
  const Evaluator evaluator(config.blocklist ? Blocklist::load(*config.blocklist)
                                             : Blocklist::defaults(),
                            runner ? &*runner : nullptr);

  std::vector<WorkUnit> units;
  for (const CorpusSource& src : config.corpora) {
    if (!filter.admits_dataset(src.label)) continue;
    const Corpus& corpus = corpora.at(src.label);
    for (const Task& task : corpus.tasks) {
      for (const auto& model : models) {
        if (filter.admits_model(model->name())) units.push_back({&src.label, &task, model.get()});
      }
    }
  }

  RunSummary summary;
  summary.planned = units.size() * config.methods.size() * Level::kCount;
  std::atomic<std::size_t> reused{0}, recorded{0}, failed{0}, calls{0};
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (;;) {
      if (hooks.should_stop && hooks.should_stop()) return;
      const std::size_t index = next++;
      if (index >= units.size()) return;
      const WorkUnit& unit = units[index];
      const ResponseFormat format = response_format(unit.task->kind);
      for (Method method : config.methods) {
        const Ladder ladder = build_ladder(*unit.task, method, config.master_seed);
        for (int i = 0; i < Level::kCount; ++i) {
          const Level level = Level::from_index(i);
          const OutcomeKey key{*unit.dataset, unit.task->id, unit.model->name(), method, level};
          if (store.contains(key)) {
            ++reused;
            continue;
          }
          const ObfuscatedVariant& variant = ladder.variants[static_cast<std::size_t>(i)];
          try {
            const auto started = Clock::now();
            const ModelResponse response =
                query(*unit.model, render_prompt(variant, unit.task->kind), format, &cache);
            if (!response.from_cache) calls += static_cast<std::size_t>(response.attempts);
            const Verdict verdict = evaluator.score(*unit.task, response);

            OutcomeRecord record;
            record.dataset = *unit.dataset;
            record.outcome = {unit.task->id,   unit.model->name(), method,
                              level,           verdict.correct,    verdict.detail,
                              verdict.failed_case, verdict.message,
                              std::chrono::duration_cast<std::chrono::milliseconds>(
                                  Clock::now() - started)};
            record.variant_seed = variant.spec.seed;
            record.attempts = response.attempts;
            record.from_cache = response.from_cache;
            if (store.append(record)) ++recorded;
          } catch (const StoreCorruption&) {
            throw;
          } catch (const IoError&) {
            throw;
          } catch (const std::exception& e) {
            ++failed;
            errors.write(unit, method, level, e);
            spdlog::warn("{} / {} / {} / {} @ {}: {}", *unit.dataset, unit.task->id,
                         unit.model->name(), to_string(method), level.label(), e.what());
          }
        }
      }
    }
  };

  const int threads = std::max(1, std::min<int>(config.parallelism, static_cast<int>(units.size())));
  std::vector<std::exception_ptr> fatal(static_cast<std::size_t>(threads));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          worker();
        } catch (...) {
          fatal[static_cast<std::size_t>(t)] = std::current_exception();
          next = units.size();
        }
      });
    }
  }
  for (const auto& e : fatal) {
    if (e) std::rethrow_exception(e);
  }

  summary.reused = reused;
  summary.recorded = recorded;
  summary.failed = failed;
  summary.model_calls = calls;
  spdlog::info("run finished: {} planned, {} reused, {} recorded, {} failed, {} model calls",
               summary.planned, summary.reused, summary.recorded, summary.failed,
               summary.model_calls);
  return summary;
}

AccuracyGrid build_grid(const std::vector<OutcomeRecord>& records) {
  AccuracyGrid grid;
  for (const OutcomeRecord& r : records) {
    grid.record({r.dataset, r.outcome.model, r.outcome.method, r.outcome.level}, r.outcome.correct);
  }
  return grid;
}

Analysis analyze(const ResultsStore& store, const ExperimentConfig& config,
                 const RunFilter& filter) {
  std::vector<OutcomeRecord> records;
  for (OutcomeRecord& r : store.records()) {
    if (filter.admits_dataset(r.dataset) && filter.admits_model(r.outcome.model)) {
      records.push_back(std::move(r));
    }
  }
  if (records.empty()) throw std::invalid_argument("store holds no outcomes to analyze");
  if (std::none_of(records.begin(), records.end(),
                   [](const OutcomeRecord& r) { return !r.outcome.level.is_baseline(); })) {
    throw InsufficientLevels("insufficient levels: the store only holds level-0 outcomes");
  }

  Analysis analysis;
  analysis.grid = build_grid(records);
  analysis.confidence = config.confidence;
  analysis.n_resamples = config.n_resamples;

  for (const std::string& dataset : analysis.grid.datasets()) {
    DatasetAnalysis da;
    da.dataset = dataset;
    try {
      da.curve = decay_curve(analysis.grid, {dataset, std::nullopt, {}});
      for (const std::string& model : analysis.grid.models(dataset)) {
        da.model_curves.emplace(model, decay_curve(analysis.grid, {dataset, model, {}}));
      }
      for (Method method : kAllMethods) {
        const Selection selection{dataset, std::nullopt, {method}};
        const bool present =
            std::any_of(analysis.grid.cells().begin(), analysis.grid.cells().end(),
                        [&](const auto& cell) { return selection.matches(cell.first); });
        if (present) da.method_curves.emplace(method, decay_curve(analysis.grid, selection));
      }
      da.stats = compute_decay_stats(
          analysis.grid, {dataset, std::nullopt, {}},
          {config.n_resamples, config.confidence, resample_seed(config.master_seed, dataset, "*")});
      for (const std::string& model : analysis.grid.models(dataset)) {
        da.per_model.emplace(
            model, compute_decay_stats(analysis.grid, {dataset, model, {}},
                                       {config.n_resamples, config.confidence,
                                        resample_seed(config.master_seed, dataset, model)}));
      }
    } catch (const ZeroBaseline& e) {
      da.stats.reset();
      da.error = std::string("zero baseline: no task was solved unobfuscated, so decay is "
                             "undefined (") + e.what() + ")";
    } catch (const MissingBaseline& e) {
      da.stats.reset();
      da.error = std::string("missing baseline: ") + e.what();
    } catch (const InsufficientLevels& e) {
      da.stats.reset();
      da.error = std::string("insufficient levels: ") + e.what();
    }
    analysis.datasets.emplace(dataset, std::move(da));
  }

  std::vector<std::pair<std::string, std::string>> pairs = config.pairs;
  if (pairs.empty()) {
    const auto names = analysis.grid.datasets();
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) pairs.emplace_back(names[i], names[j]);
    }
  }
  for (const auto& [a, b] : pairs) {
    const auto ia = analysis.datasets.find(a);
    const auto ib = analysis.datasets.find(b);
    if (ia == analysis.datasets.end() || ib == analysis.datasets.end() || !ia->second.stats ||
        !ib->second.stats) {
      continue;
    }
    analysis.verdicts.push_back(contamination_verdict(*ia->second.stats, *ib->second.stats, a, b));
  }
  return analysis;
}

}  // namespace decayprobe
