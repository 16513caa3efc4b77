// core/include/gid/util.h

// Copyright 2026  The gid authors
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
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef GID_UTIL_H_
#define GID_UTIL_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace gid {

/// 64-bit FNV-1a. Used for cache keys, manifest hashes and token ids, so the
/// value must never depend on the platform.
std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 14695981039346656037ULL);

/// Lower-case 16-digit hex rendering of a 64-bit hash.
std::string HexDigest(std::uint64_t h);

/// Mixes two 64-bit values (splitmix64 finalizer over a xor-rotate).
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

/// Seeded generator whose draws are identical on every conforming platform.
/// std::uniform_int_distribution and friends are implementation-defined, so
/// the distributions here are written out over raw mt19937_64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  /// Uniform in [0, 1).
  double Uniform() { return (engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [0, n); n must be positive.
  std::size_t Index(std::size_t n);
  /// Standard normal via Box-Muller (no cached second draw).
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T> &v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = Index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Trims ASCII whitespace from both ends.
std::string Trim(std::string_view s);

/// floor(ratio * units) with a tolerance for binary representation error,
/// e.g. 0.29 * 100 evaluates to 28.999999999999996.
std::size_t FloorRatio(double ratio, std::size_t units);

}  // namespace gid

#endif  // GID_UTIL_H_
