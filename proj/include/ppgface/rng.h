// include/ppgface/rng.h

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PPGFACE_RNG_H_
#define PPGFACE_RNG_H_

#include <cmath>
#include <cstdint>
#include <string>

#include "ppgface/common.h"

namespace ppgface {

/// Counter-based deterministic RNG: the stream is a pure function of
/// (seed, counter), so state can be forked, serialized, and replayed
/// regardless of thread schedule.
class RngStream {
 public:
  explicit RngStream(uint64_t seed, uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  /// Independent stream derived from this seed and a label (e.g. one
  /// stream per utterance id).
  RngStream Fork(const std::string &label) const {
    return RngStream(Fnv1a64(label, seed_ ^ 0x9e3779b97f4a7c15ULL));
  }

  uint64_t NextU64() {
    // splitmix64 of seed ^ counter.
    uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double Uniform() { return (NextU64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  /// Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n) {
    PPGFACE_ASSERT(n > 0, "UniformInt: n must be positive");
    return NextU64() % n;
  }

  /// Standard normal via Box-Muller (one draw per call, no caching, so
  /// the stream stays a pure function of the counter).
  double Gaussian() {
    double u1 = Uniform();
    double u2 = Uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  uint64_t seed() const { return seed_; }
  uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t counter_;
};

}  // namespace ppgface

#endif  // PPGFACE_RNG_H_
