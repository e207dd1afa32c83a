/*
 * Copyright 2026 The keller-lab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace keller {

/// Deterministic random stream with cheap, collision-resistant substream
/// derivation.  Substreams are keyed by integers, so batch drivers can hand
/// out independent generators per target/shard and the results do not depend
/// on scheduling order or worker count.
///
/// All floating-point draws are hand-rolled from raw 64-bit output of
/// std::mt19937_64 (whose sequence is fixed by the standard); we never use
/// std::*_distribution, which is implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix(seed)) {}

  /// Independent stream derived from (seed, key).
  static RngStream substream(std::uint64_t seed, std::uint64_t key) {
    return RngStream(mix(seed ^ mix(key + 0x9e3779b97f4a7c15ull)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> gauss_complex() { return {gauss(), gauss()}; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection to kill modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  /// Signed integer in [lo, hi] inclusive.
  long long int_in(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Uniform point in the real 4-ball of radius R, seen as a pair of complex
/// numbers.  Gaussian direction times U^{1/4} radius law; no rejection.
inline std::pair<std::complex<double>, std::complex<double>> uniform_in_ball4(
    RngStream& rng, double radius) {
  double g[4];
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& gi : g) {
      gi = rng.gauss();
      norm2 += gi * gi;
    }
  } while (norm2 == 0.0);
  const double r = radius * std::pow(rng.uniform(), 0.25) / std::sqrt(norm2);
  return {{g[0] * r, g[1] * r}, {g[2] * r, g[3] * r}};
}

/// Uniform point in the complex disk of radius r.
inline std::complex<double> uniform_in_disk(RngStream& rng, double radius) {
  const double r = radius * std::sqrt(rng.uniform());
  const double a = 2.0 * M_PI * rng.uniform();
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace keller
