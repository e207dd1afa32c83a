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

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "keller/poly_map.hpp"
#include "keller/rng.hpp"

namespace keller {

using Cplx = std::complex<double>;

/// Exact dyadic lift of a double (doubles are dyadic rationals, so this is
/// lossless).  Deliberately a named free function rather than a constructor:
/// exact pipelines should never absorb floats silently.
GaussianRational exact_from_double(double re, double im = 0.0);

struct Triangle {
  Cplx a, b, c;  // a is the star center

  /// Closed point-in-triangle test (sign-of-cross-product form, exact in the
  /// sense of plain double comparisons).
  bool contains(Cplx p) const;
  double diameter() const;
};

/// 2m congruent isoceles triangles with common apex, pairwise meeting
/// exactly at the apex.
struct ThickStar {
  Cplx center;
  GaussianRational center_exact;  // exact position in the fiber coordinate
  int valence = 1;                // m
  double ray_length = 0.0;        // also the max triangle diameter
  double angle_offset = 0.0;
  std::vector<Triangle> triangles;  // exactly 2m

  double max_ray_length() const { return ray_length; }
  bool contains(Cplx w) const;
};

ThickStar build_thick_star(Cplx center, int m, double ray_length, double angle_offset);

/// A line segment in the fiber plane carrying a truncated sequence of thick
/// stars centered at dyadic parameters, with strictly increasing valences and
/// ray lengths decaying by a factor 10 across bundles of 5.
struct StaredSegment {
  GaussianRational seg_a, seg_b;  // exact endpoints (real-axis by construction)
  Cplx seg_a_f, seg_b_f;
  std::vector<ThickStar> stars;
  static constexpr int kBundleSize = 5;

  bool on_segment(Cplx w) const;
  bool contains(Cplx w) const;  // segment or any star triangle
};

/// D = region - E where the region is an open 4-ball (or an open polydisk,
/// used by the analytic volume oracles) and E is a finite union of slices
/// {z_k} x stared-segment.
///
/// E is closed with empty interior and measure zero in C^2, so D is open and
/// dense in the region and every volume quantity computed over D equals the
/// same quantity over the full region.  Definiteness of the image metric
/// rests on E being characteristic for the map family together with the
/// regularity of polynomial images; it is an argument about the
/// construction, not a runtime check.
class CharacteristicDomain {
 public:
  enum class RegionKind { Ball, Polydisk };
  enum class Location { Inside, Boundary, Outside };

  RegionKind region = RegionKind::Ball;
  double ball_radius = 0.0;       // RegionKind::Ball
  double radius_x = 0.0, radius_y = 0.0;  // RegionKind::Polydisk
  std::uint64_t geometry_seed = 0;
  int truncation = 0;  // stars per slice

  std::vector<GaussianRational> z_exact;  // pairwise distinct slice coordinates
  std::vector<Cplx> z_float;
  GaussianRational z_limit;  // declared limit of the (truncated) z sequence
  std::vector<StaredSegment> slices;  // one per z_k

  /// Exact volume of the ambient region.
  double volume() const;

  /// True iff the point is interior to the region and not in E.
  bool contains(Cplx zx, Cplx zw) const;
  bool contains(const std::pair<Cplx, Cplx>& p) const { return contains(p.first, p.second); }

  /// Region position with a boundary margin; E is ignored here (null set).
  Location classify(Cplx zx, Cplx zw, double boundary_tol) const;

  bool in_exceptional_set(Cplx zx, Cplx zw) const;

  /// Uniform sample from the region with exact E-rejection.  Hits on E are
  /// measure-zero events; they are counted via `rejected` when given.
  std::pair<Cplx, Cplx> sample(RngStream& rng, long* rejected = nullptr) const;

  /// Monte Carlo volume of D (region sampling with E rejection).
  struct McVolume {
    double value = 0.0;
    long hits_on_e = 0;
    long samples = 0;
  };
  McVolume mc_volume(long n, std::uint64_t seed) const;

  /// Verifies every construction invariant; throws std::logic_error naming
  /// the first failure.
  void verify() const;
};

/// Builds the ball-region domain: num_slices stared segments over a dyadic
/// z-sequence, K stars per slice.  All invariants are checked before return.
CharacteristicDomain build_domain(double radius, int num_slices, int stars_per_slice,
                                  std::uint64_t seed_geometry);

/// Polydisk-region variant (|x| < rx) x (|y| < ry).
CharacteristicDomain build_polydisk_domain(double rx, double ry, int num_slices,
                                           int stars_per_slice, std::uint64_t seed_geometry);

/// Interpolation-grade equality test: evaluates both maps exactly on the
/// (degree_bound+1)^2 grid {z_k} x {dyadic points of l} and returns true iff
/// all values agree.  For maps of degree <= degree_bound, grid agreement
/// forces equality by bivariate interpolation uniqueness.  Throws
/// std::invalid_argument when degree_bound is violated or the domain has too
/// few slices.
bool equality_witness(const PolyMapQ& f1, const PolyMapQ& f2, const CharacteristicDomain& d,
                      int degree_bound);

std::string domain_to_json_string(const CharacteristicDomain& d);
CharacteristicDomain domain_from_json_string(const std::string& text);
CharacteristicDomain load_domain(const std::string& path);
void save_domain(const CharacteristicDomain& d, const std::string& path);

}  // namespace keller
