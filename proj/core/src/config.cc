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

#include "decayprobe/config.h"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "decayprobe/errors.h"
#include "decayprobe/obfuscator.h"
#include "nlohmann/json.hpp"

namespace decayprobe {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": unexpected value type");
  }
}

template <typename T>
T scalar_or(const YAML::Node& parent, const char* key, T fallback, const std::string& where) {
  const YAML::Node node = parent[key];
  if (!node || node.IsNull()) return fallback;
  return scalar<T>(node, where + "." + key);
}

std::string required_string(const YAML::Node& parent, const char* key, const std::string& where) {
  const YAML::Node node = parent[key];
  if (!node || node.IsNull()) throw ConfigError(where + "." + key + ": required");
  return scalar<std::string>(node, where + "." + key);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
  }
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

ModelSpec parse_model(const YAML::Node& node, const std::string& where) {
  check_keys(node, where,
             {"name", "endpoint", "api_key_env", "provider_model", "max_reprompts",
              "request_timeout", "temperature", "max_tokens", "mock"});
  ModelSpec spec;
  spec.name = required_string(node, "name", where);
  spec.max_reprompts = scalar_or<int>(node, "max_reprompts", 3, where);
  if (const YAML::Node mock = node["mock"]) {
    check_keys(mock, where + ".mock", {"ngram_size", "tiers"});
    MockModelSpec m;
    m.ngram_size = scalar_or<int>(mock, "ngram_size", 3, where + ".mock");
    const YAML::Node tiers = mock["tiers"];
    if (!tiers || !tiers.IsSequence()) throw ConfigError(where + ".mock.tiers: expected a list");
    for (std::size_t i = 0; i < tiers.size(); ++i) {
      const std::string tw = where + ".mock.tiers[" + std::to_string(i) + "]";
      check_keys(tiers[i], tw, {"corpus", "threshold"});
      MemoryTierSpec tier;
      tier.corpus = required_string(tiers[i], "corpus", tw);
      tier.threshold = scalar_or<double>(tiers[i], "threshold", 0.35, tw);
      m.tiers.push_back(tier);
    }
    spec.mock = std::move(m);
  }
  if (node["endpoint"]) {
    ModelRef ref;
    ref.name = spec.name;
    ref.endpoint = required_string(node, "endpoint", where);
    ref.api_key_env = scalar_or<std::string>(node, "api_key_env", "", where);
    ref.provider_model = scalar_or<std::string>(node, "provider_model", spec.name, where);
    ref.max_reprompts = spec.max_reprompts;
    ref.request_timeout = std::chrono::milliseconds(static_cast<long long>(
        scalar_or<double>(node, "request_timeout", 120.0, where) * 1000.0));
    if (node["temperature"]) ref.temperature = scalar<double>(node["temperature"], where + ".temperature");
    if (node["max_tokens"]) ref.max_tokens = scalar<int>(node["max_tokens"], where + ".max_tokens");
    spec.remote = std::move(ref);
  }
  return spec;
}

}  // namespace

fs::path ExperimentConfig::effective_cache_dir() const {
  return cache_dir ? *cache_dir : output_dir / "cache";
}

ExperimentConfig parse_config(std::string_view yaml_text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  check_keys(root, "config",
             {"output_dir", "master_seed", "parallelism", "methods", "n_resamples", "confidence",
              "limits", "sandbox", "blocklist", "cache_dir", "corpora", "models", "pairs",
              "baselines"});

  ExperimentConfig config;
  config.output_dir = resolve(base_dir, required_string(root, "output_dir", "config"));
  config.master_seed = scalar_or<std::uint64_t>(root, "master_seed", 0, "config");
  config.parallelism = scalar_or<int>(root, "parallelism", 1, "config");
  config.n_resamples = scalar_or<int>(root, "n_resamples", 1000, "config");
  config.confidence = scalar_or<double>(root, "confidence", 0.95, "config");
  if (root["cache_dir"]) {
    config.cache_dir = resolve(base_dir, scalar<std::string>(root["cache_dir"], "config.cache_dir"));
  }
  if (root["blocklist"]) {
    config.blocklist = resolve(base_dir, scalar<std::string>(root["blocklist"], "config.blocklist"));
  }

  if (const YAML::Node methods = root["methods"]) {
    if (!methods.IsSequence()) throw ConfigError("config.methods: expected a list");
    for (const auto& m : methods) {
      const auto name = scalar<std::string>(m, "config.methods");
      const auto method = parse_method(name);
      if (!method) throw ConfigError("config.methods: unknown method \"" + name + "\"");
      config.methods.push_back(*method);
    }
  } else {
    config.methods.assign(kAllMethods.begin(), kAllMethods.end());
  }

  if (const YAML::Node limits = root["limits"]) {
    check_keys(limits, "config.limits", {"per_case_timeout", "memory_cap_mb"});
    config.limits.per_case_timeout = std::chrono::milliseconds(static_cast<long long>(
        scalar_or<double>(limits, "per_case_timeout", 5.0, "config.limits") * 1000.0));
    config.limits.memory_cap =
        scalar_or<std::size_t>(limits, "memory_cap_mb", 256, "config.limits") << 20;
  }

  if (const YAML::Node sandbox = root["sandbox"]) {
    check_keys(sandbox, "config.sandbox", {"command"});
    const YAML::Node command = sandbox["command"];
    if (!command || !command.IsSequence() || command.size() == 0) {
      throw ConfigError("config.sandbox.command: expected a non-empty list");
    }
    for (const auto& arg : command) {
      auto value = scalar<std::string>(arg, "config.sandbox.command");
      // Script paths written relative to the config file.
      if (value.starts_with("./") || value.starts_with("../")) {
        value = resolve(base_dir, value).string();
      }
      config.sandbox_command.push_back(std::move(value));
    }
  }

  const YAML::Node corpora = root["corpora"];
  if (corpora && !corpora.IsSequence()) throw ConfigError("config.corpora: expected a list");
  for (std::size_t i = 0; corpora && i < corpora.size(); ++i) {
    const std::string where = "config.corpora[" + std::to_string(i) + "]";
    check_keys(corpora[i], where, {"label", "path", "cutoff_note"});
    CorpusSource src;
    src.label = required_string(corpora[i], "label", where);
    src.path = resolve(base_dir, required_string(corpora[i], "path", where));
    if (corpora[i]["cutoff_note"]) {
      src.cutoff_note = scalar<std::string>(corpora[i]["cutoff_note"], where + ".cutoff_note");
    }
    config.corpora.push_back(std::move(src));
  }

  const YAML::Node models = root["models"];
  if (models && !models.IsSequence()) throw ConfigError("config.models: expected a list");
  for (std::size_t i = 0; models && i < models.size(); ++i) {
    config.models.push_back(
        parse_model(models[i], "config.models[" + std::to_string(i) + "]"));
  }
  // Mock tiers may name a corpus file instead of a configured label.
  for (auto& model : config.models) {
    if (!model.mock) continue;
    for (auto& tier : model.mock->tiers) {
      const bool is_label = std::any_of(config.corpora.begin(), config.corpora.end(),
                                        [&](const CorpusSource& c) { return c.label == tier.corpus; });
      if (!is_label) tier.corpus = resolve(base_dir, tier.corpus).string();
    }
  }

  if (const YAML::Node pairs = root["pairs"]) {
    if (!pairs.IsSequence()) throw ConfigError("config.pairs: expected a list");
    for (const auto& pair : pairs) {
      if (!pair.IsSequence() || pair.size() != 2) {
        throw ConfigError("config.pairs: each entry must be [label_a, label_b]");
      }
      config.pairs.emplace_back(scalar<std::string>(pair[0], "config.pairs"),
                                scalar<std::string>(pair[1], "config.pairs"));
    }
  }

  if (const YAML::Node baselines = root["baselines"]) {
    if (!baselines.IsSequence()) throw ConfigError("config.baselines: expected a list");
    for (std::size_t i = 0; i < baselines.size(); ++i) {
      const std::string where = "config.baselines[" + std::to_string(i) + "]";
      check_keys(baselines[i], where, {"dataset", "label", "path"});
      BaselineSource b;
      b.dataset = required_string(baselines[i], "dataset", where);
      b.path = resolve(base_dir, required_string(baselines[i], "path", where));
      b.label = scalar_or<std::string>(baselines[i], "label", b.path.stem().string(), where);
      config.baselines.push_back(std::move(b));
    }
  }
  return config;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fs::absolute(path).parent_path());
}

std::vector<std::string> validate_config(const ExperimentConfig& config) {
  std::vector<std::string> out;
  if (config.corpora.empty()) out.push_back("corpora: at least one corpus is required");
  if (config.models.empty()) out.push_back("models: at least one model is required");
  if (config.methods.empty()) out.push_back("methods: at least one method is required");
  if (config.parallelism < 1) out.push_back("parallelism: must be >= 1");
  if (config.n_resamples < 100) out.push_back("n_resamples: must be >= 100");
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    out.push_back("confidence: must lie in (0, 1)");
  }
  if (config.output_dir.empty()) out.push_back("output_dir: required");
  if (config.limits.per_case_timeout.count() <= 0) {
    out.push_back("limits.per_case_timeout: must be positive");
  }

  std::set<std::string> labels;
  for (const auto& c : config.corpora) {
    if (c.label.empty()) out.push_back("corpora: label must be non-empty");
    if (!labels.insert(c.label).second) out.push_back("corpora: duplicate label \"" + c.label + "\"");
  }
  std::set<Method> methods(config.methods.begin(), config.methods.end());
  if (methods.size() != config.methods.size()) out.push_back("methods: duplicates");

  std::set<std::string> names;
  for (const auto& m : config.models) {
    const std::string where = "models[" + m.name + "]";
    if (m.name.empty()) out.push_back("models: name must be non-empty");
    if (!names.insert(m.name).second) out.push_back("models: duplicate name \"" + m.name + "\"");
    if (m.remote.has_value() == m.mock.has_value()) {
      out.push_back(where + ": exactly one of endpoint or mock is required");
    }
    if (m.max_reprompts < 0) out.push_back(where + ".max_reprompts: must be >= 0");
    if (m.remote) {
      const auto& e = m.remote->endpoint;
      if (!e.starts_with("http://") && !e.starts_with("https://")) {
        out.push_back(where + ".endpoint: must be an http(s) URL");
      }
    }
    if (m.mock) {
      if (m.mock->ngram_size < 1) out.push_back(where + ".mock.ngram_size: must be >= 1");
      if (m.mock->tiers.empty()) out.push_back(where + ".mock.tiers: at least one tier");
      for (const auto& t : m.mock->tiers) {
        if (!(t.threshold >= 0.0 && t.threshold <= 1.0)) {
          out.push_back(where + ".mock.tiers: threshold must lie in [0, 1]");
        }
      }
    }
  }
  for (const auto& [a, b] : config.pairs) {
    if (!labels.contains(a) || !labels.contains(b)) {
      out.push_back("pairs: unknown corpus label in [" + a + ", " + b + "]");
    }
    if (a == b) out.push_back("pairs: a corpus cannot be paired with itself");
  }
  for (const auto& b : config.baselines) {
    if (!labels.contains(b.dataset)) {
      out.push_back("baselines: unknown dataset \"" + b.dataset + "\"");
    }
  }
  return out;
}

std::string manifest_json(const ExperimentConfig& config) {
  json doc;
  doc["template_version"] = kPromptTemplateVersion;
  doc["keyboard_layout_version"] = KeyboardLayout::qwerty().version();
  doc["master_seed"] = config.master_seed;
  json methods = json::array();
  for (Method m : config.methods) methods.push_back(to_string(m));
  doc["methods"] = methods;
  json corpora = json::object();
  for (const auto& c : config.corpora) corpora[c.label] = file_digest(c.path);
  doc["corpora"] = corpora;
  json models = json::object();
  for (const auto& m : config.models) {
    json entry;
    entry["max_reprompts"] = m.max_reprompts;
    if (m.remote) {
      entry["endpoint"] = m.remote->endpoint;
      entry["provider_model"] = m.remote->provider_model;
      if (m.remote->temperature) entry["temperature"] = *m.remote->temperature;
      if (m.remote->max_tokens) entry["max_tokens"] = *m.remote->max_tokens;
    }
    if (m.mock) {
      entry["ngram_size"] = m.mock->ngram_size;
      json tiers = json::array();
      for (const auto& t : m.mock->tiers) {
        const bool is_label = corpora.contains(t.corpus);
        tiers.push_back({{"corpus", is_label ? t.corpus : file_digest(t.corpus)},
                         {"threshold", t.threshold}});
      }
      entry["tiers"] = tiers;
    }
    models[m.name] = entry;
  }
  doc["models"] = models;
  doc["limits"] = {{"per_case_timeout_ms", config.limits.per_case_timeout.count()},
                   {"memory_cap", config.limits.memory_cap}};
  doc["blocklist"] = config.blocklist ? file_digest(*config.blocklist) : std::string("default");
  return doc.dump();
}

}  // namespace decayprobe
