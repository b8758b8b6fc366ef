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


#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "decayprobe/analytics.h"
#include "decayprobe/memorizer.h"
#include "decayprobe/obfuscator.h"

namespace decayprobe {
namespace {

std::string prose(std::size_t words, std::uint64_t seed) {
  static const std::vector<std::string> vocab = {
      "given", "a",     "list",  "of",     "integers", "return", "the",   "sum",
      "each",  "value", "times", "three",  "farmer",   "counts", "crates", "river",
      "quiet", "late",  "after", "market", "café",     "naïve",  "x",     "42,"};
  std::mt19937_64 rng(seed);
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += (i % 13 == 0) ? "\n" : " ";
    out += vocab[rng() % vocab.size()];
  }
  return out;
}

void BM_Truncate(benchmark::State& state) {
  const std::string text = prose(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(truncate(text, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Truncate)->Arg(100)->Arg(1000)->Arg(10000);

void BM_DeleteWords(benchmark::State& state) {
  const std::string text = prose(state.range(0), 2);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(delete_words(text, 0.5, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DeleteWords)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ApplyTypos(benchmark::State& state) {
  const std::string text = prose(state.range(0), 3);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(apply_typos(text, 0.5, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ApplyTypos)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Similarity(benchmark::State& state) {
  const std::string a = prose(state.range(0), 4);
  const std::string b = delete_words(a, 0.3, 9);
  for (auto _ : state) benchmark::DoNotOptimize(similarity(a, b, 3));
}
BENCHMARK(BM_Similarity)->Arg(100)->Arg(1000);

void BM_ResampleCi(benchmark::State& state) {
  AccuracyGrid grid;
  const int models = static_cast<int>(state.range(0));
  for (int m = 0; m < models; ++m) {
    for (Method method : kAllMethods) {
      for (int level = 0; level < Level::kCount; ++level) {
        grid.add({"d", "m" + std::to_string(m), method, Level::from_index(level)},
                 static_cast<std::uint64_t>(20 - 2 * level), 20);
      }
    }
  }
  const Selection selection{"d", std::nullopt, {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_decay_stats(grid, selection, {1000, 0.95, 7}));
  }
}
BENCHMARK(BM_ResampleCi)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace decayprobe

BENCHMARK_MAIN();
