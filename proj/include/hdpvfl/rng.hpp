// Copyright 2026 The HDP-VFL Authors
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

#ifndef HDPVFL_RNG_HPP_
#define HDPVFL_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace hdpvfl {

// Stream tags for deriving independent substreams from the shared seed.
// Both parties derive the schedule stream; each party owns its noise stream.
inline constexpr std::uint64_t kStreamSchedule = 0x5c4edu;
inline constexpr std::uint64_t kStreamActiveNoise = 0xac71f3u;
inline constexpr std::uint64_t kStreamPassiveNoise = 0x9a551f3u;
inline constexpr std::uint64_t kStreamSplit = 0x5911u;
inline constexpr std::uint64_t kStreamHoldout = 0x801d0u;
inline constexpr std::uint64_t kStreamFolds = 0xf01d5u;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed ^ (tag * 0xff51afd7ed558ccdull);
  splitmix64(s);
  return splitmix64(s);
}

// Deterministic RNG with a platform-independent bit stream. std::mt19937_64
// plus std::normal_distribution would tie reproducibility to the standard
// library implementation, so the uniform and Gaussian draws are spelled out.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in (0, 1].
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Standard normal via Box-Muller, pairwise with a cached spare.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hdpvfl

#endif  // HDPVFL_RNG_HPP_
