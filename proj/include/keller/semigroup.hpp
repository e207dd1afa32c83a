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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "keller/fiber.hpp"
#include "keller/poly_map.hpp"
#include "keller/rng.hpp"

namespace keller {

// --- random map families --------------------------------------------------

/// Elementary shear (X, Y) -> (Y, -X + p(Y)) with det J == 1 and the exact
/// inverse (p(X) - Y, X).  Compositions of these are the canonical source of
/// automorphisms with known inverses.
MapChain random_shear(RngStream& rng, int min_p_degree = 2, int max_p_degree = 4);

/// Composition of shears (and occasional translations) with total degree
/// bound; fully invertible by construction.
MapChain random_automorphism(RngStream& rng, int max_total_degree = 16);

/// Compact automorphism for metric experiments: one or two quadratic-shear
/// links plus an optional translation.  Exact membership arithmetic along
/// Monte Carlo orbits stays cheap for these (bit growth is linear in the
/// chain degree product).
MapChain random_metric_automorphism(RngStream& rng);

/// Sparse random polynomial map with small integer coefficients, exact total
/// degree `degree` in both components; generally not Keller.
PolyMapQ random_sparse_map(RngStream& rng, int degree, int extra_terms = 4);

/// (X^a, Y^b) as a chain (no inverse unless a == b == 1).
MapChain power_map(int a, int b);

// --- composition-operator probes -------------------------------------------

enum class OperatorSide { Left, Right };

/// Record of an injectivity probe of R_F (side Right: g -> g ∘ F) or L_F
/// (side Left: g -> F ∘ g): for random exactly-distinct pairs (g, h), the
/// composites must be exactly distinct.
struct OperatorProbe {
  PolyMapQ f;
  OperatorSide side = OperatorSide::Right;
  std::vector<std::pair<PolyMapQ, PolyMapQ>> trial_pairs;
  std::vector<bool> verdicts;  // true = composites differ exactly
  /// Populated only if a collision ever occurs (a theorem violation): points
  /// where the colliding g, h agree on a sample grid.
  std::vector<std::string> collision_notes;

  bool all_ok() const {
    for (bool v : verdicts)
      if (!v) return false;
    return true;
  }
};

OperatorProbe right_injectivity_probe(const PolyMapQ& f, int trials, std::uint64_t seed);
OperatorProbe left_injectivity_probe(const PolyMapQ& f, int trials, std::uint64_t seed);

// --- degree-based primality classification ---------------------------------

enum class PrimalityClass { Unit, PrimeDegree, CompositeDegree };

/// d_F prime implies the map is prime in the composition semigroup; composite
/// d_F is inconclusive.  Unit means d == 1.
struct PrimalityReport {
  DegreeEstimate degree;
  PrimalityClass classification = PrimalityClass::Unit;
};

PrimalityReport primality_classify(const MapChain& f, std::uint64_t seed, DegreeOptions opts = {});

// --- iteration --------------------------------------------------------------

/// Exact n-fold composite f ∘ ... ∘ f.  Refuses when deg(f)^n exceeds the
/// degree cap (the message names the required cap).
PolyMapQ iterate_map(const PolyMapQ& f, int n, long long degree_cap = 256);

// --- sampled B_n structure ---------------------------------------------------

/// Histogram of fiber sizes over a deterministic target grid, with the
/// monotone-nesting counts of B_n = {targets with at most n preimages} and
/// the fraction of targets attaining the top fiber size.
struct BnReport {
  std::map<int, long> histogram;
  std::vector<long> cumulative;  // cumulative[n] = #targets with fiber size <= n
  int d = 0;
  long samples = 0;
  bool nesting_ok = false;
  double top_fraction = 0.0;
  bool dense_ok = false;  // top_fraction >= 0.8
};

BnReport bn_sampler(const MapChain& f, int grid_side, FiberTolerances tol = {});

}  // namespace keller
