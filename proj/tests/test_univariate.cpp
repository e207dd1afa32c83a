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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "keller/univariate.hpp"

using namespace keller;

namespace {

double closest_root_error(const std::vector<Cplx>& roots, Cplx expected) {
  double best = 1e300;
  for (Cplx r : roots) best = std::min(best, std::abs(r - expected));
  return best;
}

}  // namespace

TEST_CASE("aberth finds roots of unity") {
  // z^6 - 1
  UniPolyC p;
  p.coeffs.assign(7, Cplx(0));
  p.coeffs[0] = -1.0;
  p.coeffs[6] = 1.0;
  auto roots = aberth_roots(p);
  REQUIRE(roots.size() == 6);
  for (int k = 0; k < 6; ++k) {
    const double a = 2.0 * M_PI * k / 6.0;
    CHECK(closest_root_error(roots, Cplx(std::cos(a), std::sin(a))) < 1e-10);
  }
}

TEST_CASE("aberth handles scattered real and complex roots") {
  // (z - 2)(z + 3)(z - (1 + i)): expand by repeated multiplication
  const std::vector<Cplx> expected = {2.0, -3.0, Cplx(1.0, 1.0)};
  UniPolyC p;
  p.coeffs = {1.0};
  for (Cplx r : expected) {
    std::vector<Cplx> next(p.coeffs.size() + 1, Cplx(0));
    for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
      next[k + 1] += p.coeffs[k];
      next[k] -= r * p.coeffs[k];
    }
    p.coeffs = std::move(next);
  }
  auto roots = aberth_roots(p);
  REQUIRE(roots.size() == 3);
  for (Cplx r : expected) CHECK(closest_root_error(roots, r) < 1e-10);
}

TEST_CASE("aberth clusters multiple roots near the true value") {
  // (z - 1)^4: double precision limits the cluster radius to ~eps^(1/4)
  UniPolyC p;
  p.coeffs = {1.0, -4.0, 6.0, -4.0, 1.0};
  auto roots = aberth_roots(p);
  REQUIRE(roots.size() == 4);
  for (Cplx r : roots) CHECK(std::abs(r - Cplx(1.0)) < 1e-3);
}

TEST_CASE("newton interpolation reproduces polynomial values") {
  UniPolyC p;
  p.coeffs = {Cplx(1, -2), Cplx(0, 1), Cplx(3, 0), Cplx(-1, 0.5)};
  auto nodes = chebyshev_nodes(7, 2.0);
  std::vector<Cplx> values;
  for (double x : nodes) values.push_back(p.eval(Cplx(x, 0)));
  UniPolyC q = interpolate_newton(nodes, values);
  q.trim_leading(1e-10);
  REQUIRE(q.degree() == p.degree());
  for (int k = 0; k <= p.degree(); ++k) CHECK(std::abs(q.coeffs[k] - p.coeffs[k]) < 1e-10);
}

TEST_CASE("chebyshev nodes are pairwise distinct") {
  auto nodes = chebyshev_nodes(33, 6.0);
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) CHECK(nodes[k] < nodes[k + 1]);
}

TEST_CASE("derivative evaluation matches finite differences") {
  UniPolyC p;
  p.coeffs = {2.0, -1.0, 0.5, 4.0};
  const Cplx z(0.7, -0.3);
  auto [v, d] = p.eval_with_derivative(z);
  CHECK(std::abs(v - p.eval(z)) == 0.0);
  const double h = 1e-7;
  const Cplx fd = (p.eval(z + h) - p.eval(z - h)) / (2 * h);
  CHECK(std::abs(d - fd) < 1e-6);
}
