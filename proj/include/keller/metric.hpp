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

#include "keller/fiber.hpp"

namespace keller {

/// Raised when more than 1% of the Monte Carlo samples had to be discarded
/// because of degenerate fibers.
struct DegenerateOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct McOptions {
  long samples = 100000;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
  FiberTolerances tol;
};

/// Monte Carlo estimate of the multiplicity-weighted symmetric-difference
/// distance between two maps over a characteristic domain.
struct MetricEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double g1_side = 0.0;  // weighted volume of G1(D) - G2(D)
  double g2_side = 0.0;  // weighted volume of G2(D) - G1(D)
  long samples = 0;
  std::uint64_t seed = 0;
  long discarded = 0;   // degenerate-fiber discards
  long resampled = 0;   // boundary-ambiguous redraws
};

/// Estimator: vol(D)/N * sum_i [ |det J_g1(z_i)|^2 * 1(g1(z_i) not in g2(D))
///                             + |det J_g2(z_i)|^2 * 1(g2(z_i) not in g1(D)) ].
/// Membership goes through preimages: inverse evaluation per invertible link,
/// fiber solving otherwise.  Fiber points within cluster_tol of the region
/// boundary trigger a resample of the z draw.  Deterministic for fixed
/// (seed, N) and independent of thread count.
MetricEstimate rho(const MapChain& g1, const MapChain& g2, const CharacteristicDomain& d,
                   const McOptions& opts);
MetricEstimate rho(const PolyMapQ& g1, const PolyMapQ& g2, const CharacteristicDomain& d,
                   const McOptions& opts);

struct VolumeReport {
  double mult_vol = 0.0;  // vol(D) * mean |det J|^2; counts multiplicity
  double mult_std_error = 0.0;
  double geometric_vol = 0.0;  // plain image volume, by target-box membership
  double geometric_std_error = 0.0;
  double excess = 0.0;  // mult_vol - geometric_vol (>= 0 up to MC noise)
  long samples = 0;
  std::uint64_t seed = 0;
  long discarded = 0;
};

/// Source-pass |det J|^2 integral plus a target-box membership pass for the
/// plain image volume.  For det J == 1 maps the first pass returns vol(D)
/// exactly with zero variance.
VolumeReport mult_volume(const MapChain& g, const CharacteristicDomain& d, const McOptions& opts);
VolumeReport mult_volume(const PolyMapQ& g, const CharacteristicDomain& d, const McOptions& opts);

struct ContractionReport {
  /// Inequality: rho(F∘G1, F∘G2) <= rho(G1, G2) + 3 sigma, valid when F is
  /// volume preserving (det J == 1).  Containment: for general finite-fiber
  /// F the multiplicity weights defeat the volume inequality; what the
  /// set-theoretic argument still gives is
  ///   (F∘G1)(D) Δ (F∘G2)(D) ⊆ F(G1(D) Δ G2(D)),
  /// verified pointwise on samples as: F(G1 z) outside (F∘G2)(D) forces
  /// G1 z outside G2(D) (and symmetrically).
  enum class Mode { Inequality, Containment };

  Mode mode = Mode::Inequality;
  MetricEstimate lhs;  // rho(F∘G1, F∘G2)
  MetricEstimate rhs;  // rho(G1, G2)
  double ratio = 0.0;  // lhs / rhs (0 when rhs is 0)
  double slack = 0.0;  // 3 * combined sigma
  long containment_samples = 0;
  long containment_violations = 0;
  long containment_ambiguous = 0;  // skipped: a membership sat on the boundary
  bool holds = false;
  DegreeEstimate f_degree;
};

/// det J == 1 maps f: checks the contraction inequality within 3 sigma and
/// reports the observed ratio with d_F.  Other finite-fiber f: verifies the
/// symmetric-difference set containment on samples (zero violations
/// expected) and reports both rho values for context.
ContractionReport contraction_experiment(const MapChain& f, const MapChain& g1,
                                         const MapChain& g2, const CharacteristicDomain& d,
                                         const McOptions& opts, int degree_targets = 10);

struct BoundsReport {
  double region_vol = 0.0;
  double image_vol = 0.0;
  double image_std_error = 0.0;
  DegreeEstimate f_degree;
  bool upper_ok = false;  // vol(F(A)) <= vol(A) + 3 sigma
  bool lower_ok = false;  // vol(A) <= d_F * vol(F(A)) + 3 d_F sigma
  long discarded = 0;
};

/// Volume squeeze for det J == 1 maps: 1/d_F vol(A) <= vol(F(A)) <= vol(A),
/// both sides within 3 sigma.  Rejects maps failing the determinant
/// condition.
BoundsReport volume_bounds_check(const MapChain& f, const CharacteristicDomain& region,
                                 const McOptions& opts, int degree_targets = 10);

}  // namespace keller
