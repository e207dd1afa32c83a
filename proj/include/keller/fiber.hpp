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

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "keller/domain.hpp"
#include "keller/poly_map.hpp"
#include "keller/univariate.hpp"

namespace keller {

using C2 = std::pair<Cplx, Cplx>;

struct FiberTolerances {
  /// residual_tol = residual_rel * (1 + ||target||)
  double residual_rel = 1e-8;
  /// cluster_tol = cluster_rel * (1 + ||point||)
  double cluster_rel = 1e-8;
  /// Eliminant declared zero below degenerate_rel * (scaled Sylvester norm).
  double degenerate_rel = 1e-10;
  AberthOptions aberth;
  int polish_max_iter = 30;
};

enum class FiberStatus { Finite, Empty, Degenerate };

struct FiberResult {
  C2 target;
  std::vector<C2> points;
  std::vector<double> residuals;  // parallel to points
  FiberStatus status = FiberStatus::Finite;
  long bezout_bound = 0;  // n * m

  long count() const { return static_cast<long>(points.size()); }
};

/// Raised when a degenerate fiber stops an operation that cannot tolerate it
/// (degree estimation, membership batches, ...).
struct DegenerateFiberError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solves F(x, y) = target by resultant elimination of Y (Sylvester
/// determinant sampled at Chebyshev X nodes, interpolated, then rooted with
/// Aberth-Ehrlich), followed by per-candidate 2D Newton polish, residual
/// filtering and cluster deduplication.
///
/// The solver precomputes the Y-coefficient tables and node data once per
/// map, so batch callers should hold one instance and call solve() per
/// target.
class FiberSolver {
 public:
  explicit FiberSolver(PolyMapC f, FiberTolerances tol = {});
  explicit FiberSolver(const PolyMapQ& f, FiberTolerances tol = {})
      : FiberSolver(to_float(f), tol) {}

  FiberResult solve(C2 target) const;

  const PolyMapC& map() const { return f_; }
  long bezout_bound() const { return bezout_; }
  const FiberTolerances& tolerances() const { return tol_; }

 private:
  PolyMapC f_;
  FiberTolerances tol_;
  int deg_p_ = 0, deg_q_ = 0;     // total degrees n, m
  int ydeg_p_ = 0, ydeg_q_ = 0;   // Y-degrees
  long bezout_ = 0;
  PolyC px_, py_, qx_, qy_;       // partials, for the Newton polish
  std::vector<std::vector<Cplx>> p_ycoeffs_, q_ycoeffs_;  // [k] = X-poly of Y^k coeff
  std::vector<double> nodes_;
  std::vector<std::vector<Cplx>> p_at_nodes_, q_at_nodes_;  // [s][k]

  UniPolyC eliminant(C2 target, bool* degenerate) const;
  std::vector<Cplx> y_candidates(Cplx x, C2 target) const;
  bool polish(C2 target, Cplx& x, Cplx& y, double& residual) const;
};

/// One-shot convenience wrapper.
inline FiberResult solve_fiber(const PolyMapQ& f, C2 target, FiberTolerances tol = {}) {
  return FiberSolver(f, tol).solve(target);
}
inline FiberResult solve_fiber(const PolyMapC& f, C2 target, FiberTolerances tol = {}) {
  return FiberSolver(std::move(f), tol).solve(target);
}

/// Full preimage machinery for a composition chain.  Each stage inverts by
/// evaluating the link's exact inverse when one is known (automorphism fast
/// path) and falls back to a fiber solve otherwise.
class ChainSolver {
 public:
  explicit ChainSolver(const MapChain& chain, FiberTolerances tol = {});

  /// All preimages of w under the chained map, deduplicated.  Throws
  /// DegenerateFiberError if any stage reports a degenerate fiber.
  std::vector<C2> preimages(C2 w) const;

  C2 eval(C2 z) const;

  /// Product over factors of |det J_factor|^2 along the evaluation orbit;
  /// the multiplicity weight of the chained map at z.
  double jacobian_weight(C2 z) const;

  /// True when every stage inverts by evaluation (no fiber solving).
  bool fully_invertible() const;
  long bezout_bound() const;
  const FiberTolerances& tolerances() const { return tol_; }

 private:
  struct Stage {
    PolyMapC map;
    PolyC jacobian;                     // det J of this factor
    std::optional<PolyMapC> inverse;    // exact inverse, converted to float
    std::optional<FiberSolver> solver;  // built only when there is no inverse
  };

  FiberTolerances tol_;
  std::vector<Stage> stages_;  // applied right-to-left in eval
};

struct DegreeEstimate {
  int d = 0;
  int samples = 0;
  std::map<int, int> histogram;  // fiber size -> count
  bool confident = false;        // max attained by >= 80% of samples
};

struct DegreeOptions {
  int k_targets = 25;
  double target_radius = 10.0;
  FiberTolerances tol;
};

/// Samples uniform targets in a 4-ball and reports the max observed fiber
/// size.  Degenerate fibers propagate as DegenerateFiberError.
DegreeEstimate geometric_degree(const PolyMapQ& f, std::uint64_t seed, DegreeOptions opts = {});
DegreeEstimate geometric_degree(const MapChain& f, std::uint64_t seed, DegreeOptions opts = {});

/// True iff some preimage of w lies in the region.
bool image_contains(const PolyMapQ& f, C2 w, const CharacteristicDomain& region,
                    FiberTolerances tol = {});

}  // namespace keller
