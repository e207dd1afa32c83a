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

#include "keller/map_io.hpp"
#include "keller/semigroup.hpp"

#include "helpers.hpp"

using namespace keller;
using namespace keller::testing;

TEST_CASE("map json round trip is byte identical") {
  for (int trial = 0; trial < 10; ++trial) {
    RngStream rng = RngStream::substream(7, trial);
    const PolyMapQ f = random_sparse_map(rng, 4);
    const std::string once = map_to_json_string(f);
    const PolyMapQ back = map_from_json_string(once);
    CHECK(equal_exact(f, back));
    CHECK(map_to_json_string(back) == once);
  }
}

TEST_CASE("rational coefficients survive exactly") {
  PolyQ p = PolyQ::monomial(1, 2, GaussianRational::parse("-7/3", "22/7"));
  const PolyMapQ f(p, yq());
  const PolyMapQ back = map_from_json_string(map_to_json_string(f));
  CHECK(back.p().coeff(1, 2).re_str() == "-7/3");
  CHECK(back.p().coeff(1, 2).im_str() == "22/7");
}

TEST_CASE("malformed map files are rejected with ParseError") {
  CHECK_THROWS_AS(map_from_json_string("not json at all"), ParseError);
  CHECK_THROWS_AS(map_from_json_string("{\"p\": []}"), ParseError);
  CHECK_THROWS_AS(map_from_json_string("{\"p\": [[0,0,\"1\"]], \"q\": []}"), ParseError);
  CHECK_THROWS_AS(map_from_json_string("{\"p\": [[0,0,\"1\",\"x\"]], \"q\": []}"), ParseError);
  CHECK_THROWS_AS(map_from_json_string("{\"p\": [[-1,0,\"1\",\"0\"]], \"q\": []}"), ParseError);
  CHECK_THROWS_AS(load_map("/nonexistent/path.json"), ParseError);
}
