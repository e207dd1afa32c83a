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

#include "keller/fiber.hpp"
#include "keller/semigroup.hpp"

#include "helpers.hpp"

using namespace keller;
using namespace keller::testing;

namespace {

bool has_point_near(const FiberResult& fr, C2 p, double tol = 1e-7) {
  for (C2 q : fr.points)
    if (dist4(p, q) < tol) return true;
  return false;
}

}  // namespace

TEST_CASE("identity fiber is the target itself") {
  const C2 target{Cplx(1.7, -0.3), Cplx(0.4, 2.2)};
  FiberResult fr = solve_fiber(PolyMapQ::identity(), target);
  CHECK(fr.status == FiberStatus::Finite);
  REQUIRE(fr.count() == 1);
  CHECK(has_point_near(fr, target, 1e-10));
  CHECK(fr.bezout_bound == 1);
}

TEST_CASE("shear fiber matches the closed form") {
  // (Y, -X + Y^2) = (a, b)  =>  y = a, x = a^2 - b
  const PolyMapQ f = shear_example();
  const C2 target{Cplx(2.0, 1.0), Cplx(-1.0, 0.5)};
  FiberResult fr = solve_fiber(f, target);
  REQUIRE(fr.count() == 1);
  const Cplx a = target.first, b = target.second;
  CHECK(has_point_near(fr, {a * a - b, a}, 1e-9));
}

TEST_CASE("power map fiber enumerates all root combinations") {
  const PolyMapQ f = power_map_q(2, 3);
  FiberResult fr = solve_fiber(f, {Cplx(1, 0), Cplx(1, 0)});
  CHECK(fr.status == FiberStatus::Finite);
  CHECK(fr.count() == 6);
  for (int sx = 0; sx < 2; ++sx)
    for (int k = 0; k < 3; ++k) {
      const Cplx x = sx == 0 ? 1.0 : -1.0;
      const double ang = 2.0 * M_PI * k / 3.0;
      CHECK(has_point_near(fr, {x, Cplx(std::cos(ang), std::sin(ang))}));
    }
}

TEST_CASE("residuals verify and survive exact re-evaluation") {
  const PolyMapQ f = power_map_q(2, 3);
  const C2 target{Cplx(2.3, 1.1), Cplx(-0.7, 0.2)};
  FiberResult fr = solve_fiber(f, target);
  const double tol = 1e-8 * (1.0 + std::sqrt(std::norm(target.first) + std::norm(target.second)));
  REQUIRE(fr.count() == 6);
  for (std::size_t k = 0; k < fr.points.size(); ++k) {
    CHECK(fr.residuals[k] <= tol);
    // Exact re-evaluation at the dyadic lift of the float point agrees with
    // the float residual to rounding.
    const GaussianRational xr = exact_from_double(fr.points[k].first.real(),
                                                  fr.points[k].first.imag());
    const GaussianRational yr = exact_from_double(fr.points[k].second.real(),
                                                  fr.points[k].second.imag());
    auto [pv, qv] = f.eval(xr, yr);
    const Cplx rp = pv.to_complex() - target.first;
    const Cplx rq = qv.to_complex() - target.second;
    const double exact_residual = std::sqrt(std::norm(rp) + std::norm(rq));
    CHECK(exact_residual <= fr.residuals[k] * 1.5 + 1e-12);
  }
}

TEST_CASE("points are pairwise separated beyond the cluster tolerance") {
  const PolyMapQ f = power_map_q(4, 9);
  FiberResult fr = solve_fiber(f, {Cplx(1.3, 0.4), Cplx(0.9, -0.6)});
  CHECK(fr.count() == 36);
  for (std::size_t i = 0; i < fr.points.size(); ++i)
    for (std::size_t j = i + 1; j < fr.points.size(); ++j) {
      const double ctol =
          1e-8 * (1.0 + std::sqrt(std::norm(fr.points[i].first) + std::norm(fr.points[i].second)));
      CHECK(dist4(fr.points[i], fr.points[j]) > ctol);
    }
}

TEST_CASE("empty fibers are reported as empty") {
  // (X^2, X*Y): targets with a = 0, b != 0 have no preimage.
  const PolyMapQ f(xq(2), xq() * yq());
  FiberResult fr = solve_fiber(f, {Cplx(0, 0), Cplx(1, 0)});
  CHECK(fr.status == FiberStatus::Empty);
  CHECK(fr.count() == 0);
}

TEST_CASE("positive-dimensional fibers are flagged degenerate") {
  // (X, X) collapses C^2 onto the diagonal line of targets.
  const PolyMapQ f(xq(), xq());
  FiberResult on_diag = solve_fiber(f, {Cplx(1, 0), Cplx(1, 0)});
  CHECK(on_diag.status == FiberStatus::Degenerate);
  FiberResult off_diag = solve_fiber(f, {Cplx(1, 0), Cplx(2, 0)});
  CHECK(off_diag.status == FiberStatus::Empty);
}

TEST_CASE("constant components are rejected") {
  CHECK_THROWS_AS(solve_fiber(PolyMapQ(cq(3), yq()), {Cplx(0, 0), Cplx(0, 0)}),
                  std::invalid_argument);
}

TEST_CASE("geometric degree of basic families") {
  SUBCASE("shear-composite chains have degree 1") {
    for (int trial = 0; trial < 3; ++trial) {
      RngStream rng = RngStream::substream(31, trial);
      const MapChain a = random_automorphism(rng, 16);
      DegreeEstimate est = geometric_degree(a, 1000 + trial);
      CHECK(est.d == 1);
      CHECK(est.confident);
    }
  }
  SUBCASE("expanded single shears have degree 1") {
    // Composite automorphisms send radius-10 targets to fiber points of size
    // ~|target|^(deg), outside the envelope of a one-shot double-precision
    // resultant; those go through the chain route above.
    for (int trial = 0; trial < 3; ++trial) {
      RngStream rng = RngStream::substream(32, trial);
      const MapChain s = random_shear(rng);
      DegreeEstimate est = geometric_degree(s.links[0].map, 1100 + trial);
      CHECK(est.d == 1);
      CHECK(est.confident);
    }
  }
  SUBCASE("(X^2, Y^3) has degree 6") {
    DegreeEstimate est = geometric_degree(power_map_q(2, 3), 2024);
    CHECK(est.d == 6);
    CHECK(est.confident);
  }
  SUBCASE("(X^4, Y^9) has degree 36") {
    DegreeEstimate est = geometric_degree(power_map_q(4, 9), 2025);
    CHECK(est.d == 36);
    CHECK(est.confident);
  }
  SUBCASE("fewer than 5 targets is a precondition failure") {
    DegreeOptions opts;
    opts.k_targets = 3;
    CHECK_THROWS_AS(geometric_degree(power_map_q(2, 2), 1, opts), std::invalid_argument);
  }
}

TEST_CASE("bezout bound holds across the test family") {
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    RngStream rng = RngStream::substream(606, trial);
    PolyMapQ f = trial % 2 == 0
                     ? random_sparse_map(rng, 1 + static_cast<int>(rng.below(3)))
                     : power_map_q(1 + static_cast<int>(rng.below(3)),
                                   1 + static_cast<int>(rng.below(3)));
    RngStream trng = RngStream::substream(707, trial);
    const C2 target = uniform_in_ball4(trng, 5.0);
    FiberResult fr = solve_fiber(f, target);
    if (fr.status == FiberStatus::Degenerate) continue;  // sparse map hit a degeneracy
    CHECK(fr.count() <= fr.bezout_bound);
    ++checked;
  }
  CHECK(checked >= 35);
}

TEST_CASE("degree multiplicativity on the power-map family") {
  for (int trial = 0; trial < 5; ++trial) {
    RngStream rng = RngStream::substream(808, trial);
    const int a = 1 + static_cast<int>(rng.below(2));
    const int b = 1 + static_cast<int>(rng.below(2));
    const int c = 1 + static_cast<int>(rng.below(2));
    const int d = 1 + static_cast<int>(rng.below(2));
    const PolyMapQ f = power_map_q(a, b);
    const PolyMapQ g = power_map_q(c, d);
    DegreeEstimate ef = geometric_degree(f, 11 + trial);
    DegreeEstimate eg = geometric_degree(g, 22 + trial);
    DegreeEstimate efg = geometric_degree(compose(f, g), 33 + trial);
    CHECK(efg.d == ef.d * eg.d);
  }
}

TEST_CASE("generic fiber size dominates the samples") {
  DegreeEstimate est = geometric_degree(power_map_q(2, 3), 99);
  long below = 0, total = 0;
  for (auto [size, count] : est.histogram) {
    total += count;
    if (size < est.d) below += count;
  }
  CHECK(below * 5 <= total);  // < d_F on at most 20% of samples
}

TEST_CASE("image membership in a region") {
  CharacteristicDomain ball1 = build_domain(1.0, 1, 5, 0);
  SUBCASE("identity: inside iff the target is inside") {
    CHECK(image_contains(PolyMapQ::identity(), {Cplx(0.1, 0), Cplx(0.2, 0)}, ball1));
    CHECK_FALSE(image_contains(PolyMapQ::identity(), {Cplx(2, 0), Cplx(0, 0)}, ball1));
  }
  SUBCASE("squaring map pushes preimages of (4, 0) outside the unit region") {
    CHECK_FALSE(image_contains(PolyMapQ(xq(2), yq()), {Cplx(4, 0), Cplx(0, 0)}, ball1));
  }
}

TEST_CASE("chain preimages match expanded-map fibers") {
  RngStream rng = RngStream::substream(909, 4);
  const MapChain chain = compose(power_map(2, 3), random_automorphism(rng, 4));
  ChainSolver solver(chain);
  const PolyMapQ flat = chain.expanded();
  FiberSolver direct(flat);
  RngStream trng = RngStream::substream(910, 0);
  for (int t = 0; t < 10; ++t) {
    const C2 w = uniform_in_ball4(trng, 3.0);
    auto via_chain = solver.preimages(w);
    FiberResult via_flat = direct.solve(w);
    REQUIRE(via_flat.status == FiberStatus::Finite);
    CHECK(via_chain.size() == via_flat.points.size());
    for (C2 p : via_chain) {
      bool found = false;
      for (C2 q : via_flat.points)
        if (dist4(p, q) < 1e-6) found = true;
      CHECK(found);
    }
  }
}
