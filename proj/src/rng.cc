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

#include "bluffsim/rng.h"

#include <cmath>

namespace bluffsim {

double SplitMix64::exponential(double mean) {
  return -mean * std::log1p(-uniform());
}

uint64_t SplitMix64::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean > 500.0) {
    // Box-Muller; the two uniforms are always consumed.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    const double x = std::round(mean + std::sqrt(mean) * z);
    return x < 0.0 ? 0 : static_cast<uint64_t>(x);
  }
  const double limit = std::exp(-mean);
  double prod = uniform();
  uint64_t k = 0;
  while (prod > limit) {
    prod *= uniform();
    ++k;
  }
  return k;
}

}  // namespace bluffsim
