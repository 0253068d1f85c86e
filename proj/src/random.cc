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

#include "privcusum/random.h"

namespace privcusum {
namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr uint64_t kSaltB = 0xc2b2ae3d27d4eb4fULL;
constexpr uint64_t kSaltC = 0x165667b19e3779f9ULL;
constexpr uint64_t kForkSalt = 0xd6e8feb86659fd93ULL;

}  // namespace

uint64_t Mix64(uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(uint64_t seed) : key_(Mix64(seed)) {}

CounterRng CounterRng::ZeroNoise() { return CounterRng(0, true); }

CounterRng CounterRng::Fork(uint64_t stream) const {
  return CounterRng(Mix64(key_ ^ Mix64(stream ^ kForkSalt)), zero_noise_);
}

uint64_t CounterRng::Bits(uint64_t a, uint64_t b, uint64_t c) const {
  uint64_t h = Mix64(key_ ^ a);
  h = Mix64(h ^ (b * kSaltB));
  h = Mix64(h ^ (c * kSaltC));
  return h;
}

double CounterRng::Uniform(uint64_t a, uint64_t b, uint64_t c) const {
  if (zero_noise_) return 0.5;
  // 53 random bits, centred in their cell so 0 and 1 are never produced.
  return (static_cast<double>(Bits(a, b, c) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace privcusum
