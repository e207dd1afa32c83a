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
#include "keller/semigroup.hpp"

#include "helpers.hpp"

using namespace keller;
using namespace keller::testing;

TEST_CASE("random shears are Keller maps with working inverses") {
  for (int trial = 0; trial < 10; ++trial) {
    RngStream rng = RngStream::substream(70, trial);
    const MapChain s = random_shear(rng);
    REQUIRE(s.links.size() == 1);
    REQUIRE(s.links[0].inverse.has_value());
    CHECK(jacobian_det(s.links[0].map) == PolyQ(GaussianRational(1)));
    CHECK(equal_exact(compose(s.links[0].map, *s.links[0].inverse), PolyMapQ::identity()));
    CHECK(equal_exact(compose(*s.links[0].inverse, s.links[0].map), PolyMapQ::identity()));
    CHECK(is_keller_normalized(s.links[0].map).strict());
  }
}

TEST_CASE("random automorphisms invert exactly along the chain") {
  for (int trial = 0; trial < 10; ++trial) {
    RngStream rng = RngStream::substream(71, trial);
    const MapChain a = random_automorphism(rng, 16);
    CHECK(a.fully_invertible());
    CHECK(a.degree_bound() <= 16);
    auto [x, y] = random_point(rng);
    auto [u, v] = a.eval(x, y);
    // Walk the inverse links in reverse order.
    GaussianRational bx = u, by = v;
    for (const ChainLink& l : a.links) {
      auto [nx, ny] = l.inverse->eval(bx, by);
      bx = nx;
      by = ny;
    }
    CHECK(bx == x);
    CHECK(by == y);
  }
}

TEST_CASE("right composition operator probe finds no collisions") {
  for (int map_trial = 0; map_trial < 3; ++map_trial) {
    RngStream rng = RngStream::substream(72, map_trial);
    const PolyMapQ f = random_automorphism(rng, 8).expanded();
    OperatorProbe probe = right_injectivity_probe(f, 25, 100 + map_trial);
    CHECK(probe.side == OperatorSide::Right);
    CHECK(probe.trial_pairs.size() == 25);
    CHECK(probe.all_ok());
    CHECK(probe.collision_notes.empty());
  }
}

TEST_CASE("left composition operator probe finds no collisions") {
  for (int map_trial = 0; map_trial < 3; ++map_trial) {
    RngStream rng = RngStream::substream(73, map_trial);
    const PolyMapQ f = random_automorphism(rng, 8).expanded();
    OperatorProbe probe = left_injectivity_probe(f, 25, 200 + map_trial);
    CHECK(probe.all_ok());
    CHECK(probe.collision_notes.empty());
  }
}

TEST_CASE("probe trial pairs are never equal") {
  OperatorProbe probe = right_injectivity_probe(shear_example(), 40, 555);
  for (const auto& [g, h] : probe.trial_pairs) CHECK_FALSE(equal_exact(g, h));
}

TEST_CASE("primality classification") {
  SUBCASE("automorphisms are units") {
    RngStream rng = RngStream::substream(74, 0);
    PrimalityReport rep = primality_classify(random_automorphism(rng, 8), 300);
    CHECK(rep.degree.d == 1);
    CHECK(rep.classification == PrimalityClass::Unit);
  }
  SUBCASE("(X^2, Y^3) has composite degree 6") {
    PrimalityReport rep = primality_classify(power_map(2, 3), 301);
    CHECK(rep.degree.d == 6);
    CHECK(rep.classification == PrimalityClass::CompositeDegree);
  }
  SUBCASE("(X^2, Y) has prime degree 2") {
    PrimalityReport rep = primality_classify(power_map(2, 1), 302);
    CHECK(rep.degree.d == 2);
    CHECK(rep.classification == PrimalityClass::PrimeDegree);
  }
}

TEST_CASE("iterate_map") {
  SUBCASE("identity is idempotent") {
    CHECK(equal_exact(iterate_map(PolyMapQ::identity(), 5), PolyMapQ::identity()));
  }
  SUBCASE("power map squares") {
    CHECK(equal_exact(iterate_map(power_map_q(2, 3), 2), power_map_q(4, 9)));
  }
  SUBCASE("shear iteration follows symbolic composition") {
    const PolyMapQ s = shear_example();
    CHECK(equal_exact(iterate_map(s, 3), compose(s, compose(s, s))));
  }
  SUBCASE("degree growth stays below deg^n") {
    RngStream rng = RngStream::substream(75, 0);
    const PolyMapQ f = random_automorphism(rng, 4).expanded();
    const PolyMapQ f3 = iterate_map(f, 3, 4096);
    long long bound = 1;
    for (int k = 0; k < 3; ++k) bound *= std::max(1, f.degree());
    CHECK(f3.degree() <= bound);
  }
  SUBCASE("cap violations name the needed cap") {
    try {
      iterate_map(power_map_q(4, 4), 5, 256);
      FAIL("expected a cap violation");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("1024") != std::string::npos);
    }
  }
}

TEST_CASE("bn_sampler") {
  SUBCASE("automorphisms have all fiber sizes 1") {
    RngStream rng = RngStream::substream(76, 0);
    BnReport rep = bn_sampler(random_automorphism(rng, 6), 5);
    CHECK(rep.d == 1);
    CHECK(rep.top_fraction == 1.0);
    CHECK(rep.dense_ok);
    CHECK(rep.nesting_ok);
  }
  SUBCASE("(X^2, Y^3) attains fiber size 6 on at least 80% of the grid") {
    BnReport rep = bn_sampler(power_map(2, 3), 5);
    CHECK(rep.d == 6);
    CHECK(rep.dense_ok);
    CHECK(rep.nesting_ok);
    CHECK(rep.samples == 25);
  }
}
