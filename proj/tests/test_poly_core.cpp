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

#include "keller/keller_check.hpp"
#include "keller/poly_map.hpp"
#include "keller/semigroup.hpp"

#include "helpers.hpp"

using namespace keller;
using namespace keller::testing;

TEST_CASE("rational parts stay canonical") {
  GaussianRational a = GaussianRational::parse("2/4", "-6/-8");
  CHECK(a.re_str() == "1/2");
  CHECK(a.im_str() == "3/4");
  GaussianRational b = GaussianRational::parse("-3/6", "0");
  CHECK(b.re_str() == "-1/2");
  CHECK((a + b).is_real() == false);
  CHECK((a + b).re_str() == "0");
  CHECK_THROWS_AS(GaussianRational::parse("1/0", "0"), std::invalid_argument);
  CHECK_THROWS_AS(GaussianRational::parse("abc", "0"), std::invalid_argument);
}

TEST_CASE("gaussian rational field arithmetic") {
  const GaussianRational i(mpq_class(0), mpq_class(1));
  CHECK(i * i == GaussianRational(-1));
  const GaussianRational z = GaussianRational::parse("3", "4");
  CHECK(z.norm_sq() == mpq_class(25));
  CHECK(z / z == GaussianRational(1));
  CHECK((GaussianRational(1) / z).re_str() == "3/25");
  CHECK_THROWS_AS(z / GaussianRational(0), std::domain_error);
}

TEST_CASE("product of conjugate linear forms") {
  // (X + Y) * (X - Y) = X^2 - Y^2
  PolyQ lhs = (xq() + yq()) * (xq() - yq());
  PolyQ expect = xq(2) - yq(2);
  CHECK(lhs == expect);
}

TEST_CASE("multiplication by zero annihilates") {
  PolyQ p = xq(2) * yq() + cq(7);
  CHECK((p * PolyQ()).is_zero());
  CHECK(p.scaled(GaussianRational(0)).is_zero());
}

TEST_CASE("cancellation prunes terms") {
  PolyQ a = xq(2) * yq() + cq(1);
  PolyQ b = -(xq(2) * yq());
  PolyQ sum = a + b;
  CHECK(sum == cq(1));
  CHECK(sum.term_count() == 1);
}

TEST_CASE("degree queries") {
  PolyQ p = xq(2) * yq(3) + xq(4);
  CHECK(p.degree() == 5);
  CHECK(p.degree_y() == 3);
  CHECK(p.degree_x() == 4);
  CHECK(PolyQ().degree() == -1);
}

TEST_CASE("compose identity law") {
  const PolyMapQ g = shear_example();
  CHECK(compose(PolyMapQ::identity(), g) == g);
  CHECK(compose(g, PolyMapQ::identity()) == g);
}

TEST_CASE("compose power maps") {
  const PolyMapQ f = power_map_q(2, 3);
  CHECK(compose(f, f) == power_map_q(4, 9));
}

TEST_CASE("compose shear with itself") {
  // (Y, -X + Y^2) o (Y, -X + Y^2) = (-X + Y^2, -Y + (-X + Y^2)^2)
  const PolyMapQ s = shear_example();
  const PolyMapQ ss = compose(s, s);
  PolyQ first = PolyQ::monomial(1, 0, GaussianRational(-1)) + yq(2);
  // (-X + Y^2)^2 = X^2 - 2XY^2 + Y^4
  PolyQ second = PolyQ::monomial(0, 1, GaussianRational(-1)) + xq(2) +
                 PolyQ::monomial(1, 2, GaussianRational(-2)) + yq(4);
  CHECK(ss == PolyMapQ(first, second));
}

TEST_CASE("jacobian determinants") {
  CHECK(jacobian_det(PolyMapQ::identity()) == cq(1));
  CHECK(jacobian_det(shear_example()) == cq(1));
  CHECK(jacobian_det(PolyMapQ(xq(2), yq())) == PolyQ::monomial(1, 0, GaussianRational(2)));
}

TEST_CASE("keller normalization report") {
  SUBCASE("shear example passes all three") {
    NormalizationReport r = is_keller_normalized(shear_example());
    CHECK(r.det_is_one);
    CHECK(r.p_ydeg_matches);
    CHECK(r.q_ydeg_matches);
    CHECK(r.strict());
  }
  SUBCASE("identity fails the Y-degree condition for P") {
    NormalizationReport r = is_keller_normalized(PolyMapQ::identity());
    CHECK(r.det_is_one);
    CHECK_FALSE(r.p_ydeg_matches);  // deg X = 1 but deg_Y X = 0
    CHECK(r.relaxed());
    CHECK_FALSE(r.strict());
  }
  SUBCASE("squaring map fails the determinant condition") {
    NormalizationReport r = is_keller_normalized(PolyMapQ(xq(2), yq()));
    CHECK_FALSE(r.det_is_one);
  }
}

TEST_CASE("normalize_by_shear") {
  SUBCASE("already normalized maps are fixed points") {
    const PolyMapQ s = shear_example();
    CHECK(normalize_by_shear(s) == s);
  }
  SUBCASE("identity becomes a strict-normalized linear map") {
    const PolyMapQ n = normalize_by_shear(PolyMapQ::identity());
    CHECK(is_keller_normalized(n).strict());
    CHECK(n.degree() == 1);
  }
  SUBCASE("triangular composite normalizes and stays Keller") {
    // (X + Y^2, Y + (X + Y^2)^2) has det J = 1 but mixed Y-degrees.
    PolyQ u = xq() + yq(2);
    PolyMapQ f(u, yq() + u * u);
    REQUIRE(jacobian_det(f) == cq(1));
    const PolyMapQ n = normalize_by_shear(f);
    CHECK(is_keller_normalized(n).strict());
  }
  SUBCASE("non-constant jacobian is rejected") {
    CHECK_THROWS_AS(normalize_by_shear(PolyMapQ(xq(2), yq())), std::invalid_argument);
  }
}

TEST_CASE("equal_exact") {
  const PolyMapQ s = shear_example();
  CHECK(equal_exact(s, s));
  PolyQ with_zero = yq();
  with_zero.add_term(2, 0, GaussianRational(0));  // no-op term
  CHECK(equal_exact(PolyMapQ(xq(), yq()), PolyMapQ(xq(), with_zero)));
  PolyMapQ flipped(yq(), PolyQ::monomial(1, 0, GaussianRational(-1)) - yq(2));
  CHECK_FALSE(equal_exact(s, flipped));
}

TEST_CASE("chain rule holds exactly on random maps and points") {
  for (int trial = 0; trial < 25; ++trial) {
    RngStream rng = RngStream::substream(101, trial);
    const PolyMapQ f = random_automorphism(rng, 8).expanded();
    const PolyMapQ g = random_automorphism(rng, 8).expanded();
    const PolyMapQ fg = compose(f, g);
    auto [x, y] = random_point(rng);
    auto gp = g.eval(x, y);
    const GaussianRational lhs = jacobian_det(fg).eval(x, y);
    const GaussianRational rhs =
        jacobian_det(f).eval(gp.first, gp.second) * jacobian_det(g).eval(x, y);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("composition and evaluation commute exactly") {
  for (int trial = 0; trial < 25; ++trial) {
    RngStream rng = RngStream::substream(202, trial);
    const PolyMapQ f = random_sparse_map(rng, 3);
    const PolyMapQ g = random_sparse_map(rng, 2);
    auto [x, y] = random_point(rng);
    auto gp = g.eval(x, y);
    CHECK(compose(f, g).eval(x, y) == f.eval(gp.first, gp.second));
  }
}

TEST_CASE("composition is associative") {
  for (int trial = 0; trial < 10; ++trial) {
    RngStream rng = RngStream::substream(303, trial);
    const PolyMapQ f = random_sparse_map(rng, 2, 2);
    const PolyMapQ g = random_sparse_map(rng, 2, 2);
    const PolyMapQ h = random_sparse_map(rng, 2, 2);
    CHECK(compose(compose(f, g), h) == compose(f, compose(g, h)));
  }
}

TEST_CASE("det J == 1 is closed under composition") {
  for (int trial = 0; trial < 20; ++trial) {
    RngStream rng = RngStream::substream(404, trial);
    const PolyMapQ f = random_automorphism(rng, 8).expanded();
    const PolyMapQ g = random_automorphism(rng, 8).expanded();
    REQUIRE(jacobian_det(f) == cq(1));
    REQUIRE(jacobian_det(g) == cq(1));
    CHECK(jacobian_det(compose(f, g)) == cq(1));
  }
}

TEST_CASE("laurent pieces") {
  LaurentQ a = LaurentQ::monomial(-2, 0, GaussianRational(1));
  LaurentQ b = LaurentQ::monomial(3, 1, GaussianRational(2));
  CHECK((a * b).min_x_exponent() == 1);
  CHECK((a * b).is_polynomial());
  CHECK_FALSE(a.is_polynomial());
  CHECK(LaurentQ().is_polynomial());  // zero has empty term set
  CHECK_THROWS_AS(a.to_polynomial(), std::domain_error);
  LaurentQ sum = a + LaurentQ::monomial(-2, 0, GaussianRational(-1));
  CHECK(sum.is_zero());
}
