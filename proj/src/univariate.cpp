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

#include "keller/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace keller {

double UniPolyC::max_abs_coeff() const {
  double m = 0.0;
  for (const Cplx& c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

Cplx UniPolyC::eval(Cplx z) const {
  Cplx v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * z + *it;
  return v;
}

std::pair<Cplx, Cplx> UniPolyC::eval_with_derivative(Cplx z) const {
  Cplx v = 0.0, d = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    d = d * z + v;
    v = v * z + *it;
  }
  return {v, d};
}

void UniPolyC::trim_leading(double rel_tol) {
  const double cut = rel_tol * max_abs_coeff();
  while (coeffs.size() > 1 && std::abs(coeffs.back()) <= cut) coeffs.pop_back();
}

std::vector<Cplx> aberth_roots(const UniPolyC& p_in, const AberthOptions& opts) {
  UniPolyC p = p_in;
  p.trim_leading();
  const int n = p.degree();
  if (n <= 0) return {};
  if (n == 1) return {-p.coeffs[0] / p.coeffs[1]};

  // Cauchy-style inclusion radius for the initial circle.
  const Cplx lead = p.coeffs[n];
  double bound = 0.0;
  for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(p.coeffs[k] / lead));
  const double r0 = 1.0 + bound;

  std::vector<Cplx> z(n);
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * M_PI * k / n + 0.4;  // offset dodges axis symmetry
    z[k] = r0 * Cplx(std::cos(a), std::sin(a));
  }

  const double tiny = 1e-300;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      auto [v, d] = p.eval_with_derivative(z[i]);
      if (std::abs(v) == 0.0) continue;
      Cplx w;
      if (std::abs(d) < tiny) {
        // Derivative collapsed (multiple-root plateau); nudge off it.
        w = Cplx(1e-8, 1e-8);
      } else {
        w = v / d;
      }
      Cplx repulsion = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        Cplx diff = z[i] - z[j];
        if (std::abs(diff) < tiny) diff = Cplx(1e-14, 1e-14);
        repulsion += 1.0 / diff;
      }
      Cplx denom = 1.0 - w * repulsion;
      Cplx corr = (std::abs(denom) < tiny) ? w : w / denom;
      z[i] -= corr;
      worst = std::max(worst, std::abs(corr) / (1.0 + std::abs(z[i])));
    }
    if (worst < opts.relative_tolerance) break;
  }
  return z;
}

UniPolyC interpolate_newton(const std::vector<double>& nodes, const std::vector<Cplx>& values) {
  const std::size_t n = nodes.size();
  if (n == 0 || values.size() != n)
    throw std::invalid_argument("interpolate_newton: node/value size mismatch");

  // Divided-difference table, in place.
  std::vector<Cplx> dd = values;
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t k = n - 1; k >= level; --k)
      dd[k] = (dd[k] - dd[k - 1]) / (nodes[k] - nodes[k - level]);

  // Expand the Newton form to monomial coefficients.
  UniPolyC out;
  out.coeffs.assign(n, Cplx(0.0));
  std::vector<Cplx> acc(n, Cplx(0.0));
  acc[0] = dd[n - 1];
  std::size_t acc_len = 1;
  for (std::size_t k = n - 1; k-- > 0;) {
    // acc := acc * (z - nodes[k]) + dd[k]
    for (std::size_t t = acc_len; t-- > 0;) {
      acc[t + 1] += acc[t];
      acc[t] *= -nodes[k];
    }
    ++acc_len;
    acc[0] += dd[k];
  }
  out.coeffs.assign(acc.begin(), acc.begin() + acc_len);
  return out;
}

std::vector<double> chebyshev_nodes(int n, double radius) {
  std::vector<double> xs(n);
  for (int s = 0; s < n; ++s) xs[s] = radius * std::cos(M_PI * (2.0 * s + 1.0) / (2.0 * n));
  return xs;
}

}  // namespace keller
