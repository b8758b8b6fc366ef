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

#ifndef DECAYPROBE_RANDOM_H_
#define DECAYPROBE_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace decayprobe {

// std::mt19937_64 has a standardized output sequence; the distributions in
// <random> do not. Everything that must be reproducible across platforms
// goes through the helpers below instead of std::*_distribution.
using Rng = std::mt19937_64;

// FNV-1a over the bytes of `data`, finalized with splitmix64.
std::uint64_t stable_hash(std::string_view data);

// Order-sensitive combination of two 64-bit values.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

// k distinct indices from [0, n), returned in ascending order.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n,
                                                    std::size_t k);

// Number of successes in `trials` Bernoulli(p) draws.
std::uint64_t binomial_draw(Rng& rng, std::uint64_t trials, double p);

}  // namespace decayprobe

#endif  // DECAYPROBE_RANDOM_H_
