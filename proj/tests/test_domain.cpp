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

#include "keller/domain.hpp"
#include "keller/keller_check.hpp"
#include "keller/semigroup.hpp"

#include "helpers.hpp"

using namespace keller;
using namespace keller::testing;

TEST_CASE("thick star shape") {
  SUBCASE("valence 1 gives two triangles") {
    ThickStar s = build_thick_star(Cplx(0, 0), 1, 0.5, 0.0);
    CHECK(s.triangles.size() == 2);
  }
  SUBCASE("valence 3 gives six triangles meeting only at the center") {
    ThickStar s = build_thick_star(Cplx(1, 1), 3, 0.25, 0.3);
    REQUIRE(s.triangles.size() == 6);
    for (const Triangle& t : s.triangles) {
      CHECK(t.a == s.center);
      CHECK(t.diameter() <= s.max_ray_length() * (1 + 1e-12));
    }
    // Sample points strictly inside each triangle must belong to exactly one.
    for (const Triangle& t : s.triangles) {
      const Cplx interior = t.a + 0.6 * ((t.b - t.a) + (t.c - t.a)) / 2.0;
      int hits = 0;
      for (const Triangle& u : s.triangles)
        if (u.contains(interior)) ++hits;
      CHECK(hits == 1);
    }
  }
  SUBCASE("degenerate ray length is rejected") {
    CHECK_THROWS_AS(build_thick_star(Cplx(0, 0), 2, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_thick_star(Cplx(0, 0), 0, 1.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("build_domain invariants") {
  SUBCASE("smallest bundle") {
    CharacteristicDomain d = build_domain(8.0, 1, 5, 1);
    CHECK(d.slices.size() == 1);
    CHECK(d.slices[0].stars.size() == 5);
    CHECK_NOTHROW(d.verify());
  }
  SUBCASE("valence sets of two slices are disjoint") {
    CharacteristicDomain d = build_domain(8.0, 2, 10, 2);
    std::vector<int> v0, v1;
    for (const auto& s : d.slices[0].stars) v0.push_back(s.valence);
    for (const auto& s : d.slices[1].stars) v1.push_back(s.valence);
    for (int a : v0)
      for (int b : v1) CHECK(a != b);
  }
  SUBCASE("bundle rays decay by at least 1/10") {
    CharacteristicDomain d = build_domain(8.0, 1, 10, 3);
    const auto& stars = d.slices[0].stars;
    double max0 = 0, max1 = 0;
    for (int i = 0; i < 5; ++i) max0 = std::max(max0, stars[i].ray_length);
    for (int i = 5; i < 10; ++i) max1 = std::max(max1, stars[i].ray_length);
    CHECK(max1 <= max0 / 10.0);
  }
  SUBCASE("the full sweep up to (5, 25) verifies") {
    for (int slices = 1; slices <= 5; ++slices)
      CHECK_NOTHROW(build_domain(8.0, slices, 25, 7).verify());
  }
}

TEST_CASE("domain membership") {
  CharacteristicDomain d = build_domain(8.0, 2, 5, 4);
  SUBCASE("origin is in D (E sits away from zero)") {
    CHECK(d.contains(Cplx(0, 0), Cplx(0, 0)));
  }
  SUBCASE("star centers lifted to their slice are in E") {
    const Cplx z = d.z_float[0];
    const Cplx w = d.slices[0].stars[0].center;
    CHECK(d.in_exceptional_set(z, w));
    CHECK_FALSE(d.contains(z, w));
    // ... and so is a point strictly inside one of its triangles
    const Triangle& t = d.slices[0].stars[0].triangles[0];
    const Cplx interior = t.a + 0.5 * ((t.b - t.a) + (t.c - t.a)) / 2.0;
    CHECK_FALSE(d.contains(z, interior));
  }
  SUBCASE("a generic first coordinate is never in E") {
    CHECK(d.contains(Cplx(0.123456, 0.654321), Cplx(0.0, 0.0)));
  }
  SUBCASE("points outside the ball are excluded") {
    CHECK_FALSE(d.contains(Cplx(9.0, 0), Cplx(0, 0)));
  }
  SUBCASE("boundary classification") {
    using Loc = CharacteristicDomain::Location;
    CHECK(d.classify(Cplx(0, 0), Cplx(0, 0), 1e-9) == Loc::Inside);
    CHECK(d.classify(Cplx(8.0, 0), Cplx(0, 0), 1e-9) == Loc::Boundary);
    CHECK(d.classify(Cplx(8.1, 0), Cplx(0, 0), 1e-9) == Loc::Outside);
  }
}

TEST_CASE("montecarlo volume sees no E mass") {
  CharacteristicDomain d = build_domain(4.0, 3, 10, 5);
  auto mc = d.mc_volume(20000, 99);
  CHECK(mc.hits_on_e == 0);
  CHECK(mc.value == doctest::Approx(M_PI * M_PI * 256.0 / 2.0).epsilon(1e-12));

  CharacteristicDomain pd = build_polydisk_domain(1.0, 1.0, 2, 5, 5);
  auto mcp = pd.mc_volume(20000, 99);
  CHECK(mcp.hits_on_e == 0);
  CHECK(mcp.value == doctest::Approx(M_PI * M_PI).epsilon(1e-12));
}

TEST_CASE("equality witness") {
  CharacteristicDomain d = build_domain(8.0, 10, 5, 11);

  SUBCASE("equal maps pass") {
    const PolyMapQ f = shear_example();
    CHECK(equality_witness(f, f, d, 4));
  }
  SUBCASE("distinct maps are distinguished") {
    const PolyMapQ f = shear_example();
    PolyMapQ g(yq(), PolyQ::monomial(1, 0, GaussianRational(-1)) - yq(2));
    CHECK_FALSE(equality_witness(f, g, d, 4));
  }
  SUBCASE("single-coefficient perturbations are caught") {
    for (int trial = 0; trial < 20; ++trial) {
      RngStream rng = RngStream::substream(717, trial);
      const PolyMapQ f = random_sparse_map(rng, 5);
      PolyQ bumped = f.p();
      bumped.add_term(static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3)),
                      GaussianRational(1));
      const PolyMapQ g(bumped, f.q());
      REQUIRE_FALSE(equal_exact(f, g));
      CHECK_FALSE(equality_witness(f, g, d, 8));
    }
  }
  SUBCASE("degree bound violations are flagged, not judged") {
    // (X, Y + X * prod(X - z_k)) agrees with the identity on every grid
    // column by construction; its degree must disqualify it.
    PolyQ prod = cq(1);
    for (int k = 0; k < 9; ++k)
      prod = prod * (xq() - PolyQ(d.z_exact[k]));
    const PolyMapQ trick(xq(), yq() + xq() * prod);
    CHECK_THROWS_AS(equality_witness(PolyMapQ::identity(), trick, d, 8),
                    std::invalid_argument);
  }
  SUBCASE("too few slices fail loudly") {
    CharacteristicDomain small = build_domain(8.0, 2, 5, 1);
    CHECK_THROWS_AS(equality_witness(shear_example(), shear_example(), small, 4),
                    std::invalid_argument);
  }
  SUBCASE("witness agrees with equal_exact on random pairs") {
    for (int trial = 0; trial < 20; ++trial) {
      RngStream rng = RngStream::substream(818, trial);
      const PolyMapQ f = random_sparse_map(rng, 4);
      const PolyMapQ g = random_sparse_map(rng, 4);
      CHECK(equality_witness(f, g, d, 8) == equal_exact(f, g));
    }
  }
}

TEST_CASE("domain serialization round trip") {
  CharacteristicDomain d = build_domain(6.0, 3, 10, 42);
  const std::string text = domain_to_json_string(d);
  CharacteristicDomain back = domain_from_json_string(text);
  CHECK_NOTHROW(back.verify());
  CHECK(back.ball_radius == d.ball_radius);
  CHECK(back.z_float == d.z_float);
  REQUIRE(back.slices.size() == d.slices.size());
  for (std::size_t k = 0; k < d.slices.size(); ++k) {
    REQUIRE(back.slices[k].stars.size() == d.slices[k].stars.size());
    for (std::size_t s = 0; s < d.slices[k].stars.size(); ++s) {
      CHECK(back.slices[k].stars[s].center == d.slices[k].stars[s].center);
      CHECK(back.slices[k].stars[s].ray_length == d.slices[k].stars[s].ray_length);
      CHECK(back.slices[k].stars[s].valence == d.slices[k].stars[s].valence);
    }
  }
  CHECK(domain_to_json_string(back) == text);
}
