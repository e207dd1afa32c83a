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
#include <vector>

namespace keller {

using Cplx = std::complex<double>;

/// Dense univariate polynomial over C; coeffs[k] is the coefficient of z^k.
struct UniPolyC {
  std::vector<Cplx> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double max_abs_coeff() const;

  Cplx eval(Cplx z) const;
  /// Returns (p(z), p'(z)) in one Horner pass.
  std::pair<Cplx, Cplx> eval_with_derivative(Cplx z) const;

  /// Drops leading coefficients below rel_tol * max |coeff|.
  void trim_leading(double rel_tol = 1e-12);
};

struct AberthOptions {
  int max_iterations = 200;
  /// Converged when max |correction| / (1 + |root|) drops below this.
  double relative_tolerance = 1e-12;
};

/// All complex roots of p by the Aberth-Ehrlich simultaneous iteration.
/// Multiple roots come back as clusters of nearby approximations; callers
/// that need them sharp should polish against their original system.
std::vector<Cplx> aberth_roots(const UniPolyC& p, const AberthOptions& opts = {});

/// Coefficients of the degree <= values.size()-1 polynomial interpolating
/// (nodes[s], values[s]) via Newton divided differences.  Nodes must be
/// pairwise distinct.
UniPolyC interpolate_newton(const std::vector<double>& nodes, const std::vector<Cplx>& values);

/// Chebyshev nodes r*cos(pi (2s+1) / (2n)), s = 0..n-1 (pairwise distinct).
std::vector<double> chebyshev_nodes(int n, double radius);

}  // namespace keller
