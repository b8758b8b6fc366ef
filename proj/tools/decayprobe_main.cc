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

// decayprobe: obfuscate -> query -> evaluate -> analyze -> report.
//
// Exit status: 0 success, 1 runtime failure, 2 invalid config or usage.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "decayprobe/config.h"
#include "decayprobe/errors.h"
#include "decayprobe/experiment.h"
#include "decayprobe/obfuscator.h"
#include "decayprobe/report.h"

namespace fs = std::filesystem;
using namespace decayprobe;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> models;
  std::optional<std::string> only_dataset;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "experiment YAML")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "override master_seed");
  cmd->add_option("--models", opts.models, "restrict to these models")->delimiter(',');
  cmd->add_option("--only-dataset", opts.only_dataset, "restrict to one corpus label");
  cmd->add_flag("-v,--verbose", opts.verbose, "debug logging");
}

ExperimentConfig load(const CommonOptions& opts) {
  ExperimentConfig config = load_config(opts.config);
  if (opts.seed) config.master_seed = *opts.seed;
  return config;
}

RunFilter filter_of(const CommonOptions& opts) { return RunFilter{opts.models, opts.only_dataset}; }

std::vector<std::pair<std::string, BaselineCurve>> load_baselines(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, BaselineCurve>> out;
  for (const BaselineSource& b : config.baselines) {
    out.emplace_back(b.dataset, load_baseline_curve(b.path, b.label));
  }
  return out;
}

void print_verdicts(const Analysis& analysis) {
  for (const VerdictReport& v : analysis.verdicts) {
    std::cout << v.label_a << " vs " << v.label_b << ": " << to_string(v.flag);
    if (v.suspected) std::cout << " (" << *v.suspected << ")";
    std::cout << '\n';
    for (const MetricComparison& c : v.comparisons) {
      std::printf("  %-10s %8.3f %8.3f  diff %+.3f%s\n", std::string(to_string(c.metric)).c_str(),
                  c.a, c.b, c.difference, c.disjoint ? "  disjoint" : "");
    }
  }
  for (const auto& [name, da] : analysis.datasets) {
    if (da.error) std::cout << name << ": " << *da.error << '\n';
  }
  std::cout.flush();
}

int cmd_validate(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  const auto problems = validate_config(config);
  for (const auto& p : problems) std::cerr << "config: " << p << '\n';
  if (!problems.empty()) return 2;
  const auto corpora = load_corpora(config);
  for (const auto& [label, corpus] : corpora) {
    std::cout << label << ": " << corpus.tasks.size() << " tasks\n";
  }
  for (const BaselineSource& b : config.baselines) load_baseline_curve(b.path, b.label);
  std::cout << "ok\n";
  return 0;
}

int cmd_obfuscate(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  const auto corpora = load_corpora(config);
  const fs::path dir = config.output_dir / "variants";
  fs::create_directories(dir);
  for (const auto& [label, corpus] : corpora) {
    if (opts.only_dataset && *opts.only_dataset != label) continue;
    const fs::path path = dir / (label + ".ndjson");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    std::size_t n = 0;
    for (const Task& task : corpus.tasks) {
      for (Method method : config.methods) {
        for (const ObfuscatedVariant& v : build_ladder(task, method, config.master_seed).variants) {
          out << serialize_variant(task, v) << '\n';
          ++n;
        }
      }
    }
    std::cout << path.string() << ": " << n << " variants\n";
  }
  return 0;
}

int report(const ExperimentConfig& config, const CommonOptions& opts) {
  const Analysis analysis = analyze(ResultsStore::read(config.output_dir / "store"), config,
                                    filter_of(opts));
  const ReportFiles files = emit_report(analysis, load_baselines(config), config.output_dir);
  std::cout << "wrote " << files.results_csv.string() << ", " << files.stats_json.string() << ", "
            << files.table_csv.string() << " and " << files.charts.size() << " chart(s)\n";
  print_verdicts(analysis);
  return 0;
}

int cmd_run(const CommonOptions& opts, bool no_report) {
  const ExperimentConfig config = load(opts);
  const RunSummary s = run_experiment(config, filter_of(opts));
  std::cout << "planned " << s.planned << ", reused " << s.reused << ", recorded " << s.recorded
            << ", failed " << s.failed << ", model calls " << s.model_calls << '\n';
  if (no_report) return 0;
  return report(config, opts);
}

int cmd_analyze(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  const Analysis analysis = analyze(ResultsStore::read(config.output_dir / "store"), config,
                                    filter_of(opts));
  std::cout << stats_json(analysis);
  return 0;
}

int cmd_verdict(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  print_verdicts(analyze(ResultsStore::read(config.output_dir / "store"), config, filter_of(opts)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contamination probe via prompt-obfuscation decay curves", "decayprobe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "decayprobe 0.1.0");

  CommonOptions opts;
  bool no_report = false;
  auto* validate = app.add_subcommand("validate", "check config, corpora and baselines");
  auto* obfuscate = app.add_subcommand("obfuscate", "write every variant to output_dir/variants");
  auto* run = app.add_subcommand("run", "query models, score, record, then report");
  auto* analyze_cmd = app.add_subcommand("analyze", "print decay statistics as JSON");
  auto* report_cmd = app.add_subcommand("report", "write CSVs, stats JSON and charts");
  auto* verdict = app.add_subcommand("verdict", "print contamination verdicts");
  for (auto* cmd : {validate, obfuscate, run, analyze_cmd, report_cmd, verdict}) add_common(cmd, opts);
  run->add_flag("--no-report", no_report, "skip analysis and report emission");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage problems share the config-error exit code.
    return app.exit(e) == 0 ? 0 : 2;
  }
  spdlog::set_level(opts.verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_default_logger(spdlog::stderr_color_mt("decayprobe"));

  try {
    if (*validate) return cmd_validate(opts);
    if (*obfuscate) return cmd_obfuscate(opts);
    if (*run) return cmd_run(opts, no_report);
    if (*analyze_cmd) return cmd_analyze(opts);
    if (*report_cmd) return report(load(opts), opts);
    if (*verdict) return cmd_verdict(opts);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
