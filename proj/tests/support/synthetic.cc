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

#include "synthetic.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "decayprobe/random.h"

namespace decayprobe::testing {
namespace {

namespace fs = std::filesystem;

constexpr std::array<const char*, 96> kWords = {
    "harbour",    "lantern",   "meadow",     "orchard",    "granite",   "quarrel",
    "whistle",    "blanket",   "cathedral",  "velvet",     "thunder",   "saddle",
    "compass",    "juniper",   "marble",     "parcel",     "ribbon",    "scaffold",
    "tapestry",   "umbrella",  "vineyard",   "wardrobe",   "almanac",   "barnacle",
    "cinnamon",   "dolphin",   "emerald",    "falcon",     "gazette",   "hammock",
    "iceberg",    "jasmine",   "kettle",     "labyrinth",  "mackerel",  "nutmeg",
    "obelisk",    "pelican",   "quartz",     "rosemary",   "sapphire",  "trellis",
    "undertow",   "voyage",    "walnut",     "yeoman",     "zephyr",    "archive",
    "beacon",     "chimney",   "drizzle",    "ember",      "fountain",  "glacier",
    "horizon",    "ivory",     "journey",    "kingdom",    "lullaby",   "monsoon",
    "nectar",     "outpost",   "pinnacle",   "quiver",     "rampart",   "summit",
    "timber",     "uplands",   "vessel",     "willow",     "bramble",   "cobbler",
    "driftwood",  "estuary",   "ferryman",   "goldsmith",  "heather",   "inkwell",
    "jubilee",    "keystone",  "lighthouse", "millstone",  "nightfall", "overture",
    "pilgrim",    "riverbank", "shipwright", "tinderbox",  "vanguard",  "wayfarer",
    "almond",     "bluebell",  "caravan",    "dovetail",   "evergreen", "foxglove"};

std::string pick(Rng& rng) { return kWords[uniform_below(rng, kWords.size())]; }

std::string story(Rng& rng, int sentences, int words) {
  std::string out;
  for (int s = 0; s < sentences; ++s) {
    std::string sentence = pick(rng);
    sentence[0] = static_cast<char>(sentence[0] - 'a' + 'A');
    for (int w = 1; w < words; ++w) sentence += ' ' + pick(rng);
    out += (out.empty() ? "" : " ") + sentence + '.';
  }
  return out;
}

std::string list_json(const std::vector<long long>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + std::to_string(xs[i]);
  return out + "]";
}

std::vector<long long> random_list(Rng& rng) {
  std::vector<long long> xs(2 + uniform_below(rng, 6));
  for (auto& x : xs) x = static_cast<long long>(uniform_below(rng, 41)) - 20;
  return xs;
}

struct Family {
  const char* description;  // %K% is replaced by the task parameter
  const char* solution;
  long long (*apply)(const std::vector<long long>&, long long);
};

const std::array<Family, 4> kFamilies = {{
    {"Given a list of integers xs, return the sum of its elements multiplied by %K%.",
     "def solve(xs):\n    return sum(xs) * %K%",
     [](const std::vector<long long>& xs, long long k) {
       return std::accumulate(xs.begin(), xs.end(), 0LL) * k;
     }},
    {"Given a list of integers xs, return how many elements are strictly greater than %K%.",
     "def solve(xs):\n    return sum(1 for x in xs if x > %K%)",
     [](const std::vector<long long>& xs, long long k) {
       return static_cast<long long>(std::count_if(xs.begin(), xs.end(), [&](long long x) { return x > k; }));
     }},
    {"Given a list of integers xs, return the largest element minus the smallest element plus %K%.",
     "def solve(xs):\n    return max(xs) - min(xs) + %K%",
     [](const std::vector<long long>& xs, long long k) {
       const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
       return *hi - *lo + k;
     }},
    {"Given a list of integers xs, return the sum of the squares of its elements minus %K%.",
     "def solve(xs):\n    return sum(x * x for x in xs) - %K%",
     [](const std::vector<long long>& xs, long long k) {
       long long s = 0;
       for (long long x : xs) s += x * x;
       return s - k;
     }},
}};

std::string replace_k(std::string text, long long k) {
  const std::string needle = "%K%";
  for (std::size_t pos; (pos = text.find(needle)) != std::string::npos;) {
    text.replace(pos, needle.size(), std::to_string(k));
  }
  return text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Corpus make_code_corpus(std::string name, std::size_t n, std::uint64_t seed) {
  Rng rng(hash_combine(seed, stable_hash(name)));
  Corpus corpus;
  corpus.name = name;
  for (std::size_t i = 0; i < n; ++i) {
    const Family& family = kFamilies[uniform_below(rng, kFamilies.size())];
    const long long k = 2 + static_cast<long long>(uniform_below(rng, 9));
    Task task;
    task.id = name + "-" + std::to_string(i + 1);
    task.kind = TaskKind::kCode;
    task.prompt = story(rng, 3, 9) + " " + replace_k(family.description, k) + " " + story(rng, 3, 9);
    task.solution = replace_k(family.solution, k);
    std::vector<TestCase> tests;
    for (int c = 0; c < 3; ++c) {
      const auto xs = random_list(rng);
      tests.push_back({"[" + list_json(xs) + "]", std::to_string(family.apply(xs, k))});
    }
    task.tests = std::move(tests);
    corpus.tasks.push_back(std::move(task));
  }
  return corpus;
}

Corpus make_math_corpus(std::string name, std::size_t n, std::uint64_t seed) {
  Rng rng(hash_combine(seed, stable_hash(name)));
  Corpus corpus;
  corpus.name = name;
  for (std::size_t i = 0; i < n; ++i) {
    const long long a = 10 + static_cast<long long>(uniform_below(rng, 90));
    const long long b = 2 + static_cast<long long>(uniform_below(rng, 8));
    const long long c = static_cast<long long>(uniform_below(rng, 50));
    Task task;
    task.id = name + "-" + std::to_string(i + 1);
    task.kind = TaskKind::kMath;
    task.prompt = story(rng, 3, 9) + " A " + pick(rng) + " holds " + std::to_string(a) +
                  " crates, each crate holds " + std::to_string(b) + " jars, and " +
                  std::to_string(c) + " jars are broken. How many intact jars are there? " +
                  story(rng, 3, 9);
    task.answer = std::to_string(a * b - c);
    corpus.tasks.push_back(std::move(task));
  }
  return corpus;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) { return read_file(path); }

fs::path stub_runner_path() { return DECAYPROBE_STUB_RUNNER; }

std::vector<std::string> stub_runner_command() {
  return {"python3", "-S", "-I", stub_runner_path().string()};
}

fs::path write_mock_experiment(const MockExperiment& spec) {
  fs::create_directories(spec.dir);
  const auto make = spec.code ? make_code_corpus : make_math_corpus;
  write_text(spec.dir / "memorized.jsonl",
             serialize_corpus(make(kMemorizedLabel, spec.tasks, spec.corpus_seed)));
  write_text(spec.dir / "fresh.jsonl",
             serialize_corpus(make(kFreshLabel, spec.tasks, spec.corpus_seed + 1)));

  std::ostringstream y;
  y << "output_dir: out\n"
    << "master_seed: " << spec.master_seed << "\n"
    << "parallelism: " << spec.parallelism << "\n"
    << "n_resamples: " << spec.n_resamples << "\n"
    << "confidence: 0.95\n"
    << "methods: [";
  for (std::size_t i = 0; i < spec.methods.size(); ++i) y << (i ? ", " : "") << spec.methods[i];
  y << "]\n";
  if (spec.code) {
    y << "limits: {per_case_timeout: 2, memory_cap_mb: 1024}\n"
      << "sandbox:\n  command: [python3, -S, -I, \"" << stub_runner_path().string() << "\"]\n";
  }
  y << "corpora:\n"
    << "  - {label: " << kMemorizedLabel << ", path: memorized.jsonl, cutoff_note: before cutoff}\n"
    << "  - {label: " << kFreshLabel << ", path: fresh.jsonl, cutoff_note: after cutoff}\n"
    << "models:\n"
    << "  - name: mock-memorizer\n"
    << "    mock:\n"
    << "      tiers:\n"
    << "        - {corpus: " << kMemorizedLabel << ", threshold: " << spec.loose_threshold << "}\n"
    << "        - {corpus: " << kFreshLabel << ", threshold: " << spec.strict_threshold << "}\n"
    << "pairs:\n  - [" << kMemorizedLabel << ", " << kFreshLabel << "]\n";
  if (spec.with_baseline) {
    write_text(spec.dir / "human.csv", "rate,value\n0.0,1.0\n0.5,0.8\n1.0,0.3\n");
    y << "baselines:\n  - {dataset: " << kFreshLabel << ", label: humans, path: human.csv}\n";
  }
  write_text(spec.dir / "config.yaml", y.str());
  return spec.dir / "config.yaml";
}

}  // namespace decayprobe::testing
