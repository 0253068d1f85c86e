//
// Copyright 2026 The privcusum Authors.
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
//

#ifndef PRIVCUSUM_RANDOM_H_
#define PRIVCUSUM_RANDOM_H_

#include <cstdint>
#include <limits>

namespace privcusum {

// Keyed counter-based generator. A draw is a pure function of the key and a
// counter triple, so noise for (time, bin, kind) is reproducible regardless of
// evaluation order. Forking derives an independent key for a sub-stream.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed);

  // A source whose uniforms are all exactly 0.5; Laplace draws through it are
  // exactly zero.
  static CounterRng ZeroNoise();

  CounterRng Fork(uint64_t stream) const;

  uint64_t Bits(uint64_t a, uint64_t b = 0, uint64_t c = 0) const;

  // Uniform on the open interval (0, 1).
  double Uniform(uint64_t a, uint64_t b = 0, uint64_t c = 0) const;

  uint64_t key() const { return key_; }
  bool zero_noise() const { return zero_noise_; }

 private:
  CounterRng(uint64_t key, bool zero_noise) : key_(key), zero_noise_(zero_noise) {}

  uint64_t key_;
  bool zero_noise_ = false;
};

// Sequential view over a CounterRng. Satisfies UniformRandomBitGenerator so it
// can drive <random> distributions.
class RandomStream {
 public:
  using result_type = uint64_t;

  explicit RandomStream(uint64_t seed) : rng_(seed) {}
  explicit RandomStream(CounterRng rng) : rng_(rng) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return rng_.Bits(counter_++); }
  double Uniform() { return rng_.Uniform(counter_++); }

  const CounterRng& rng() const { return rng_; }

 private:
  CounterRng rng_;
  uint64_t counter_ = 0;
};

// SplitMix64 output mixer.
uint64_t Mix64(uint64_t x);

}  // namespace privcusum

#endif  // PRIVCUSUM_RANDOM_H_
