// Copyright 2026 The rcd Authors.
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

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace rcd {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive an independent stream seed from a master seed and a path of
/// identifiers (scenario, replicate, proposal, ...). The result depends only
/// on its arguments, so work can be scheduled in any order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t id : path) h = mix64(h + 0x9e3779b97f4a7c15ULL * (id + 1));
  return h;
}

/// Counter-based SplitMix64 generator: the i-th output is mix64(seed + i*gamma).
/// Satisfies UniformRandomBitGenerator so <random> distributions work on it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() { return normal_(*this); }
  double normal(double mean, double sd) { return mean + sd * normal_(*this); }

  double cauchy(double scale = 1.0) { return scale * cauchy_(*this); }

  std::size_t index(std::size_t n) noexcept { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::uint64_t state_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::cauchy_distribution<double> cauchy_{0.0, 1.0};
};

}  // namespace rcd
