// Copyright 2026 The Kandinsky Toolkit Authors
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

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace kandinsky {

// SplitMix64 finalizer, used only to derive child seeds.
inline constexpr std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream identifiers. Each generator family draws from its own domain so
// that adding near-misses to a run never perturbs the positives.
enum class StreamDomain : std::uint64_t {
  kPositives = 1,
  kNegatives = 2,
  kNearMisses = 3,
  kStrataProbe = 4,
  kSplit = 5,
  kChallenge = 6,
  kFree = 7,
};

// A seedable, portable random source: std::mt19937_64 for the bit stream,
// with hand-rolled uniform mappings because the standard distributions are
// implementation-defined and would break cross-platform reproducibility.
//
// Stream splitting rule: the stream for (seed, domain, index) is seeded with
// Mix64(Mix64(seed ^ Mix64(domain)) + index). Figure i of a batch always uses
// index i, so results do not depend on how indices are scheduled on threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  static std::uint64_t StreamSeed(std::uint64_t seed, StreamDomain domain,
                                  std::uint64_t index) {
    return Mix64(Mix64(seed ^ Mix64(static_cast<std::uint64_t>(domain))) + index);
  }

  static Rng Stream(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
    return Rng(StreamSeed(seed, domain, index));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform01() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) {
    if (!(hi > lo)) return lo;
    return lo + (hi - lo) * Uniform01();
  }

  // Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t Below(std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
      draw = NextU64();
    } while (draw >= limit);
    return draw % bound;
  }

  // Uniform integer in [lo, hi].
  int Between(int lo, int hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<int>(Below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool Coin() { return (NextU64() >> 63) != 0; }

  template <typename T>
  const T& Pick(const std::vector<T>& values) {
    return values[Below(values.size())];
  }

  // Fisher-Yates with this generator's Below().
  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[Below(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace kandinsky
