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

#include <stdexcept>
#include <string>

#include "keller/poly_map.hpp"

namespace keller {

/// Outcome of the two normalization checks on a candidate Keller map:
/// (1) det J == 1 identically, (2) Y-degree equals total degree, per
/// component.  Strict mode requires all three booleans; relaxed mode only the
/// determinant condition.
struct NormalizationReport {
  bool det_is_one = false;
  bool p_ydeg_matches = false;
  bool q_ydeg_matches = false;

  bool strict() const { return det_is_one && p_ydeg_matches && q_ydeg_matches; }
  bool relaxed() const { return det_is_one; }
  bool passes(bool strict_mode) const { return strict_mode ? strict() : relaxed(); }
};

inline NormalizationReport is_keller_normalized(const PolyMapQ& f) {
  NormalizationReport r;
  const PolyQ det = jacobian_det(f);
  r.det_is_one = (det == PolyQ(GaussianRational(1)));
  r.p_ydeg_matches = (f.p().degree() == f.p().degree_y());
  r.q_ydeg_matches = (f.q().degree() == f.q().degree_y());
  return r;
}

/// Brings a constant-Jacobian map onto the Y-degree normalization by
/// precomposing with the shear X -> X + tY and rescaling the first component
/// so det J returns to exactly 1.  The returned map differs from f by linear
/// automorphisms only.
///
/// The Y-degree condition fails only where a coefficient polynomial in t
/// vanishes, so a short deterministic sweep t = 1, -1, 2, -2, ... finds a
/// good t within 2*(deg+1) candidates.
inline PolyMapQ normalize_by_shear(const PolyMapQ& f) {
  const PolyQ det = jacobian_det(f);
  if (!det.is_constant() || det.is_zero())
    throw std::invalid_argument("normalize_by_shear: det J is not a nonzero constant");

  if (is_keller_normalized(f).strict()) return f;

  const int deg = std::max(1, f.degree());
  const int max_candidates = 2 * (deg + 1);
  const GaussianRational c = det.constant_value();

  for (int k = 0; k < max_candidates; ++k) {
    const int t = (k % 2 == 0) ? (k / 2 + 1) : -(k / 2 + 1);
    // L_t = (X + tY, Y); precomposition keeps det J constant.
    PolyQ lx = PolyQ::var_x() + PolyQ::monomial(0, 1, GaussianRational(t));
    PolyMapQ sheared = compose(f, PolyMapQ(std::move(lx), PolyQ::var_y()));
    NormalizationReport rep = is_keller_normalized(sheared);
    if (!(rep.p_ydeg_matches && rep.q_ydeg_matches)) continue;
    if (c == GaussianRational(1)) return sheared;
    // Rescale det back to 1 with the diagonal map (X/c, Y).
    PolyQ scaled_p = sheared.p().scaled(GaussianRational(1) / c);
    return PolyMapQ(std::move(scaled_p), sheared.q());
  }

  // Name the component still failing on the last candidate for diagnostics.
  PolyQ lx = PolyQ::var_x() + PolyQ::monomial(0, 1, GaussianRational(1));
  PolyMapQ probe = compose(f, PolyMapQ(std::move(lx), PolyQ::var_y()));
  NormalizationReport rep = is_keller_normalized(probe);
  const std::string who = !rep.p_ydeg_matches ? "first" : "second";
  throw std::runtime_error("normalize_by_shear: no shear among " +
                           std::to_string(max_candidates) +
                           " candidates fixed the " + who + " component");
}

}  // namespace keller
