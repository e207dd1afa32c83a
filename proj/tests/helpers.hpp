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

#include <complex>

#include "keller/poly_map.hpp"
#include "keller/rng.hpp"

namespace keller::testing {

inline PolyQ xq(int i = 1) { return PolyQ::monomial(i, 0, GaussianRational(1)); }
inline PolyQ yq(int j = 1) { return PolyQ::monomial(0, j, GaussianRational(1)); }
inline PolyQ cq(int v) { return PolyQ(GaussianRational(v)); }

/// (Y, -X + Y^2): the running normalized-shear example.
inline PolyMapQ shear_example() {
  return PolyMapQ(yq(), PolyQ::monomial(1, 0, GaussianRational(-1)) + yq(2));
}

inline PolyMapQ power_map_q(int a, int b) {
  return PolyMapQ(PolyQ::monomial(a, 0, GaussianRational(1)),
                  PolyQ::monomial(0, b, GaussianRational(1)));
}

inline GaussianRational rational(long num, long den = 1) {
  return GaussianRational(mpq_class(num, den));
}

/// Small random Gaussian-rational point for exact identities.
inline std::pair<GaussianRational, GaussianRational> random_point(RngStream& rng) {
  auto part = [&] {
    const long num_re = static_cast<long>(rng.int_in(-9, 9));
    const long den_re = static_cast<long>(1 + rng.below(4));
    const long num_im = static_cast<long>(rng.int_in(-9, 9));
    const long den_im = static_cast<long>(1 + rng.below(4));
    return GaussianRational(mpq_class(num_re, den_re), mpq_class(num_im, den_im));
  };
  return {part(), part()};
}

inline double dist4(std::pair<std::complex<double>, std::complex<double>> a,
                    std::pair<std::complex<double>, std::complex<double>> b) {
  return std::sqrt(std::norm(a.first - b.first) + std::norm(a.second - b.second));
}

}  // namespace keller::testing
