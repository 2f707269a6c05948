// Copyright 2026 The ttakit Authors
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

#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace ttakit {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;
inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = kFnvOffsetBasis;
  for (const char ch : bytes) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= kFnvPrime;
  }
  return h;
}

/// First output of a SplitMix64 generator seeded with `x`.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + kSplitMixGamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Anything that hands out uniform reals in [0, 1). Samplers are written
/// against this so tests can script exact draw sequences.
template <typename S>
concept UniformSource = requires(S& s) {
  { s.next_uniform() } -> std::convertible_to<double>;
};

/// SplitMix64 stream. Equal states produce equal sequences.
class RngStream {
 public:
  constexpr explicit RngStream(std::uint64_t state) noexcept : state_(state) {}

  constexpr std::uint64_t state() const noexcept { return state_; }

  constexpr std::uint64_t next_u64() noexcept {
    const std::uint64_t out = splitmix64(state_);
    state_ += kSplitMixGamma;
    return out;
  }

  /// Top 53 bits of the next output scaled by 2^-53.
  constexpr double next_uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t state_;
};

/// Per-image stream; independent of the order in which images are visited.
constexpr RngStream derive_stream(std::uint64_t global_seed, std::string_view image_id) noexcept {
  return RngStream(splitmix64(global_seed ^ fnv1a64(image_id)));
}

/// Box-Muller from exactly two uniforms. A zero first draw is replaced by 2^-53.
template <UniformSource S>
double next_gaussian(S& s, double mean, double sigma) {
  double u1 = s.next_uniform();
  const double u2 = s.next_uniform();
  if (u1 == 0.0) u1 = 0x1.0p-53;
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + sigma * z;
}

}  // namespace ttakit
