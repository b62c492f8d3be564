// Copyright 2026 The Bluffsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BLUFFSIM_RNG_H_
#define BLUFFSIM_RNG_H_

#include <cstdint>

namespace bluffsim {

// Stream identifiers. Each consumer draws from its own stream so adding a
// consumer never perturbs the values an existing one sees.
enum class RngStream : uint64_t {
  kTraffic = 1,
  kInjection = 2,
  kBluffPool = 3,
  kPopulation = 4,
  kInventory = 5,
};

// SplitMix64. The output sequence is fixed by the algorithm, so runs are
// reproducible across compilers and platforms. Only the derived draws below
// are used by the simulator; no <random> distributions are involved.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(uint64_t state) : state_(state) {}

  // Generator for (seed, stream, substream). The substream lets a consumer
  // split further, e.g. one sequence per agent.
  static constexpr SplitMix64 for_stream(uint64_t seed, RngStream stream,
                                         uint64_t substream = 0) {
    uint64_t s = mix(seed ^ mix(static_cast<uint64_t>(stream) * kGamma));
    s = mix(s ^ mix((substream + 1) * 0xD1B54A32D192ED03ull));
    return SplitMix64(s);
  }

  constexpr uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  constexpr double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in [0, bound). Rejection keeps it unbiased.
  constexpr uint64_t below(uint64_t bound) {
    if (bound <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  constexpr bool bernoulli(double p) { return uniform() < p; }

  // Exponential with the given mean, by inversion.
  double exponential(double mean);

  // Poisson by inversion for small means, normal approximation above 500.
  uint64_t poisson(double mean);

 private:
  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static constexpr uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

}  // namespace bluffsim

#endif  // BLUFFSIM_RNG_H_
