// Copyright 2026 The dplr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPLR_RNG_H_
#define DPLR_RNG_H_

#include <cstdint>
#include <limits>
#include <random>

namespace dplr {

// Seeded generator with independent substreams.
//
// Each (seed, stream) pair is expanded through std::seed_seq into a
// Mersenne Twister state, so the stream for trial k of an experiment is a
// pure function of the experiment seed and k. Both the engine and the seed
// sequence are fully specified by the standard, which keeps streams
// reproducible across platforms. Floating-point variates are derived here
// rather than through <random> distributions, whose algorithms are
// implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  // Stream reserved for replication `trial` of an experiment seeded with
  // `seed`. Stream 0 is left to top-level (non-replicated) use.
  static Rng ForTrial(std::uint64_t seed, std::uint64_t trial) {
    return Rng(seed, trial + 1);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return engine_(); }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double Uniform();

  // Standard normal via the Marsaglia polar method; the second variate of
  // each accepted pair is cached and returned by the next call.
  double Normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dplr

#endif  // DPLR_RNG_H_
