// Copyright 2026 The stlplan Authors
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

#pragma once

#include <array>
#include <cstdint>

namespace stlplan {

// Finalization round of splitmix64. Full avalanche, bijective.
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed and up to three
// counters (purpose tag, iteration, rollout index). Streams for distinct
// tuples are decorrelated, so batches of rollouts can run in any order, or
// in parallel, and still reproduce bit-identical results.
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0,
                            uint64_t c = 0) {
  uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (a + 0xbf58476d1ce4e5b9ULL));
  h = mix64(h ^ (b + 0x94d049bb133111ebULL));
  h = mix64(h ^ (c + 0x2545f4914f6cdd1dULL));
  return h;
}

// xoshiro256++ stream. Self-contained so that draws are identical across
// platforms and standard library versions; the standard distributions make
// no such guarantee.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) {
    // Expand the seed through splitmix64 as recommended for xoshiro seeding.
    uint64_t s = seed;
    for (auto& word : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      word = mix64(s);
    }
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform draw in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Fixed-point multiply; the bias of at most
  // n / 2^64 is far below anything observable here.
  int uniform_int(int n) {
    return static_cast<int>(
        (static_cast<unsigned __int128>(next_u64()) * static_cast<uint64_t>(n)) >> 64);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<uint64_t, 4> state_;
};

}  // namespace stlplan
