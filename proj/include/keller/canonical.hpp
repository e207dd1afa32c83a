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
#include <string>
#include <vector>

#include "keller/poly_map.hpp"

namespace keller {

/// Univariate exact polynomial in X, as coefficient vector (coeffs[k] is the
/// coefficient of X^k, trailing zeros trimmed).
struct UniPolyQ {
  std::vector<GaussianRational> coeffs;

  UniPolyQ() = default;
  explicit UniPolyQ(std::vector<GaussianRational> c) : coeffs(std::move(c)) { trim(); }

  void trim() {
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
  }
  bool is_zero() const { return coeffs.empty(); }
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  static UniPolyQ zero() { return UniPolyQ(); }
  static UniPolyQ monomial(int k, GaussianRational c);

  /// Parses e.g. "X^2 + 3*X - 1/2" (integer or rational real coefficients).
  static UniPolyQ parse(const std::string& text);

  std::string str() const;
};

/// The rational mapping R(X, Y) = (X^(-alpha), X^beta * Y + X^(-alpha) *
/// Phi(X)).  Any (alpha >= 1, beta >= 0, Phi) triple can be substituted; the
/// triple is *canonical* when additionally deg Phi < alpha + beta and the
/// effective X exponents of X^(alpha+beta) Y + Phi(X) have gcd 1, which is
/// what validate_canonical checks.
struct CanonicalRational {
  int alpha = 1;
  int beta = 0;
  UniPolyQ phi;
};

/// Why a triple failed validation (empty when it passed).
struct CanonicalCheck {
  bool ok = false;
  bool degree_ok = false;
  bool gcd_ok = false;
  std::string reason;
};

CanonicalCheck check_canonical(int alpha, int beta, const UniPolyQ& phi);

/// Returns the validated triple or throws std::invalid_argument naming the
/// violated side condition.
CanonicalRational validate_canonical(int alpha, int beta, UniPolyQ phi);

/// The two Laurent components of a substituted map.
struct LaurentMapPair {
  LaurentQ first, second;

  bool is_polynomial() const { return first.is_polynomial() && second.is_polynomial(); }
};

/// Exact Laurent expansion of f ∘ r, no truncation.  X exponents are bounded
/// below by -alpha * deg f; Y exponents stay nonnegative.
LaurentMapPair substitute(const PolyMapQ& f, const CanonicalRational& r);

inline bool is_polynomial(const LaurentMapPair& pair) { return pair.is_polynomial(); }

/// Reinterprets f ∘ r as a polynomial map; throws std::domain_error when a
/// negative X exponent survives.
PolyMapQ dual_map(const PolyMapQ& f, const CanonicalRational& r);

/// Trace of the parametrization Y -> g_r(0, Y) at `samples` deterministic
/// real Y values (equally spaced on [-1, 1]); plot-ready.
std::vector<std::pair<std::complex<double>, std::complex<double>>>
component_parametrization(const PolyMapQ& g_r, int samples);

/// Instance check of the basis-monotonicity law: if g ∘ r is polynomial then
/// (f ∘ g) ∘ r must be polynomial as well.
struct MonotonicityReport {
  bool g_r_polynomial = false;
  bool fg_r_polynomial = false;
  /// True only if g∘r is polynomial and (f∘g)∘r is not; must never happen.
  bool violation = false;
};

MonotonicityReport check_basis_monotonicity(const PolyMapQ& f, const PolyMapQ& g,
                                            const CanonicalRational& r);

}  // namespace keller
