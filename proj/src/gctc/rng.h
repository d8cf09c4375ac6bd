// src/gctc/rng.h
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef GCTC_RNG_H_
#define GCTC_RNG_H_

#include <cstdint>

namespace gctc {

// splitmix64. Used instead of <random> engines/distributions so that a seed
// produces the same stream on every platform; run outputs are promised to be
// byte-reproducible from the manifest.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t NextU64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double NextDouble() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi] inclusive. Modulo bias is irrelevant here.
  int UniformInt(int lo, int hi) {
    return lo + static_cast<int>(NextU64() %
                                 static_cast<uint64_t>(hi - lo + 1));
  }

  bool Bernoulli(double p) { return NextDouble() < p; }

 private:
  uint64_t state_;
};

// Derives an independent per-item seed from a base seed, so items can be
// processed in parallel with reproducible results.
inline uint64_t DeriveSeed(uint64_t base, uint64_t index) {
  Rng rng(base ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  return rng.NextU64();
}

}  // namespace gctc

#endif  // GCTC_RNG_H_
