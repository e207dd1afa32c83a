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

#include "keller/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "keller/map_io.hpp"

namespace keller {

using nlohmann::json;

GaussianRational exact_from_double(double re, double im) {
  mpq_class qr, qi;
  mpq_set_d(qr.get_mpq_t(), re);
  mpq_set_d(qi.get_mpq_t(), im);
  return GaussianRational(qr, qi);
}

namespace {

double cross2(Cplx u, Cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }
double dot2(Cplx u, Cplx v) { return u.real() * v.real() + u.imag() * v.imag(); }

/// Dyadic parameter sequence 1/2, 1/4, 3/4, 1/8, 3/8, 5/8, 7/8, 1/16, ...
/// dense in (0, 1); returned as exact rationals.
std::vector<mpq_class> dyadic_params(int count) {
  std::vector<mpq_class> out;
  out.reserve(count);
  for (long level = 1; static_cast<int>(out.size()) < count; ++level) {
    const long den = 1L << level;
    for (long num = 1; num < den && static_cast<int>(out.size()) < count; num += 2)
      out.emplace_back(num, den);
  }
  return out;
}

}  // namespace

bool Triangle::contains(Cplx p) const {
  const double s1 = cross2(b - a, p - a);
  const double s2 = cross2(c - b, p - b);
  const double s3 = cross2(a - c, p - c);
  return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

double Triangle::diameter() const {
  return std::max({std::abs(b - a), std::abs(c - b), std::abs(a - c)});
}

bool ThickStar::contains(Cplx w) const {
  if (std::abs(w - center) > ray_length) return false;
  for (const Triangle& t : triangles)
    if (t.contains(w)) return true;
  return false;
}

ThickStar build_thick_star(Cplx center, int m, double ray_length, double angle_offset) {
  if (m < 1) throw std::invalid_argument("thick star needs valence >= 1");
  if (!(ray_length > 0.0)) throw std::invalid_argument("thick star needs ray_length > 0");

  ThickStar s;
  s.center = center;
  s.center_exact = exact_from_double(center.real(), center.imag());
  s.valence = m;
  s.ray_length = ray_length;
  s.angle_offset = angle_offset;

  // 2m rays with uniform angular spacing pi/m; the half-apex angle is capped
  // at pi/6 so the base never exceeds the rays and the triangle diameter
  // equals ray_length.
  const double spacing = M_PI / m;
  const double half_apex = std::min(spacing / 4.0, M_PI / 6.0);
  s.triangles.reserve(2 * m);
  for (int t = 0; t < 2 * m; ++t) {
    const double theta = angle_offset + spacing * t;
    Triangle tri;
    tri.a = center;
    tri.b = center + ray_length * Cplx(std::cos(theta - half_apex), std::sin(theta - half_apex));
    tri.c = center + ray_length * Cplx(std::cos(theta + half_apex), std::sin(theta + half_apex));
    s.triangles.push_back(tri);
  }
  return s;
}

bool StaredSegment::on_segment(Cplx w) const {
  const Cplx d = seg_b_f - seg_a_f;
  const Cplx r = w - seg_a_f;
  if (cross2(d, r) != 0.0) return false;
  const double t = dot2(d, r);
  return t >= 0.0 && t <= dot2(d, d);
}

bool StaredSegment::contains(Cplx w) const {
  if (on_segment(w)) return true;
  for (const ThickStar& s : stars)
    if (s.contains(w)) return true;
  return false;
}

double CharacteristicDomain::volume() const {
  if (region == RegionKind::Ball) {
    const double r2 = ball_radius * ball_radius;
    return M_PI * M_PI * r2 * r2 / 2.0;  // vol of the 4-ball
  }
  return M_PI * radius_x * radius_x * M_PI * radius_y * radius_y;
}

bool CharacteristicDomain::in_exceptional_set(Cplx zx, Cplx zw) const {
  for (std::size_t k = 0; k < z_float.size(); ++k)
    if (zx == z_float[k]) return slices[k].contains(zw);
  return false;
}

bool CharacteristicDomain::contains(Cplx zx, Cplx zw) const {
  if (region == RegionKind::Ball) {
    if (std::norm(zx) + std::norm(zw) >= ball_radius * ball_radius) return false;
  } else {
    if (std::abs(zx) >= radius_x || std::abs(zw) >= radius_y) return false;
  }
  return !in_exceptional_set(zx, zw);
}

CharacteristicDomain::Location CharacteristicDomain::classify(Cplx zx, Cplx zw,
                                                              double boundary_tol) const {
  double signed_dist;  // negative inside
  if (region == RegionKind::Ball) {
    signed_dist = std::sqrt(std::norm(zx) + std::norm(zw)) - ball_radius;
  } else {
    signed_dist = std::max(std::abs(zx) - radius_x, std::abs(zw) - radius_y);
  }
  if (signed_dist > boundary_tol) return Location::Outside;
  if (signed_dist >= -boundary_tol) return Location::Boundary;
  return Location::Inside;
}

std::pair<Cplx, Cplx> CharacteristicDomain::sample(RngStream& rng, long* rejected) const {
  for (;;) {
    std::pair<Cplx, Cplx> p;
    if (region == RegionKind::Ball) {
      p = uniform_in_ball4(rng, ball_radius);
    } else {
      p = {uniform_in_disk(rng, radius_x), uniform_in_disk(rng, radius_y)};
    }
    if (!in_exceptional_set(p.first, p.second)) return p;
    if (rejected) ++*rejected;
  }
}

CharacteristicDomain::McVolume CharacteristicDomain::mc_volume(long n, std::uint64_t seed) const {
  McVolume out;
  out.samples = n;
  RngStream rng = RngStream::substream(seed, 0xd0114u);
  for (long i = 0; i < n; ++i) {
    std::pair<Cplx, Cplx> p;
    if (region == RegionKind::Ball) {
      p = uniform_in_ball4(rng, ball_radius);
    } else {
      p = {uniform_in_disk(rng, radius_x), uniform_in_disk(rng, radius_y)};
    }
    if (in_exceptional_set(p.first, p.second)) ++out.hits_on_e;
  }
  out.value = volume() * static_cast<double>(n - out.hits_on_e) / static_cast<double>(n);
  return out;
}

void CharacteristicDomain::verify() const {
  auto fail = [](const std::string& what) { throw std::logic_error("domain invariant: " + what); };

  if (z_exact.size() != slices.size()) fail("one stared segment per z_k required");
  if (z_float.size() != z_exact.size()) fail("z mirror size mismatch");

  for (std::size_t i = 0; i < z_float.size(); ++i)
    for (std::size_t j = i + 1; j < z_float.size(); ++j)
      if (z_float[i] == z_float[j]) fail("z sequence not pairwise distinct");

  // Valence sets of distinct slices must be disjoint; within a slice they
  // must be strictly increasing.
  std::vector<int> all_valences;
  for (const StaredSegment& sl : slices) {
    if (static_cast<int>(sl.stars.size()) != truncation) fail("truncation K not honored");
    for (std::size_t i = 0; i + 1 < sl.stars.size(); ++i)
      if (sl.stars[i].valence >= sl.stars[i + 1].valence)
        fail("valences not strictly increasing along a slice");
    for (const ThickStar& s : sl.stars) all_valences.push_back(s.valence);
  }
  std::sort(all_valences.begin(), all_valences.end());
  if (std::adjacent_find(all_valences.begin(), all_valences.end()) != all_valences.end())
    fail("valence sets of distinct slices overlap");

  for (const StaredSegment& sl : slices) {
    // Star shape: exactly 2m triangles meeting only at the common center,
    // diameters bounded by the ray length.
    for (const ThickStar& s : sl.stars) {
      if (static_cast<int>(s.triangles.size()) != 2 * s.valence)
        fail("thick star must have exactly 2m triangles");
      for (const Triangle& t : s.triangles) {
        if (t.a != s.center) fail("triangle apex must be the star center");
        // Rounding slack must absorb |center|-sized cancellation when rays
        // are many orders of magnitude shorter than the center offset.
        if (t.diameter() > s.ray_length + 1e-12 * (1.0 + std::abs(s.center)))
          fail("triangle diameter exceeds ray length");
      }
      const double spacing = M_PI / s.valence;
      const double half_apex = std::min(spacing / 4.0, M_PI / 6.0);
      if (!(2.0 * half_apex < spacing)) fail("triangle sectors overlap");
    }

    // Centers on the segment (segments are real-axis by construction, so the
    // collinearity is exact).
    for (const ThickStar& s : sl.stars)
      if (!sl.on_segment(s.center)) fail("star center off its segment");

    // Off-segment parts pairwise disjoint: enclosing disks must be disjoint.
    for (std::size_t i = 0; i < sl.stars.size(); ++i)
      for (std::size_t j = i + 1; j < sl.stars.size(); ++j) {
        const double gap = std::abs(sl.stars[i].center - sl.stars[j].center);
        if (sl.stars[i].ray_length + sl.stars[j].ray_length >= gap)
          fail("star disks overlap within a slice");
      }

    // Bundle decay: each bundle's max ray at most 1/10 of the previous one.
    const int bundles = (static_cast<int>(sl.stars.size()) + StaredSegment::kBundleSize - 1) /
                        StaredSegment::kBundleSize;
    double prev_max = 0.0;
    for (int b = 0; b < bundles; ++b) {
      double bmax = 0.0;
      for (int t = b * StaredSegment::kBundleSize;
           t < std::min<int>((b + 1) * StaredSegment::kBundleSize, sl.stars.size()); ++t)
        bmax = std::max(bmax, sl.stars[t].ray_length);
      if (b > 0 && bmax > prev_max / 10.0) fail("bundle ray decay slower than 1/10");
      prev_max = bmax;
    }
  }

  // E must fit strictly inside the open region.
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const StaredSegment& sl = slices[k];
    double wmax = std::max(std::abs(sl.seg_a_f), std::abs(sl.seg_b_f));
    for (const ThickStar& s : sl.stars)
      wmax = std::max(wmax, std::abs(s.center) + s.ray_length);
    if (region == RegionKind::Ball) {
      if (std::norm(z_float[k]) + wmax * wmax >= ball_radius * ball_radius)
        fail("exceptional set not contained in the open ball");
    } else {
      if (std::abs(z_float[k]) >= radius_x || wmax >= radius_y)
        fail("exceptional set not contained in the open polydisk");
    }
  }
}

namespace {

CharacteristicDomain build_impl(CharacteristicDomain::RegionKind kind, double rx, double ry,
                                int num_slices, int stars_per_slice, std::uint64_t seed) {
  if (num_slices < 1 || stars_per_slice < 1)
    throw std::invalid_argument("build_domain: need at least one slice and one star");
  if (!(rx > 0.0) || !(ry > 0.0)) throw std::invalid_argument("build_domain: radius must be positive");

  CharacteristicDomain d;
  d.region = kind;
  d.geometry_seed = seed;
  d.truncation = stars_per_slice;
  if (kind == CharacteristicDomain::RegionKind::Ball) {
    d.ball_radius = rx;
  } else {
    d.radius_x = rx;
    d.radius_y = ry;
  }

  // Scales keeping E strictly inside the region: slice coordinates within
  // 0.6 * rx, fiber extent (segment plus largest star) within 0.75 * ry.
  const double z_scale = 0.6 * rx;
  const double seg_half = 0.3 * ry;

  // Dyadic z-sequence z_k = z_scale * (1/2 + 2^-(k+1)), decreasing to the
  // declared limit z_scale / 2.
  const GaussianRational z_scale_q = exact_from_double(z_scale);
  d.z_limit = z_scale_q * GaussianRational(mpq_class(1, 2));
  for (int k = 0; k < num_slices; ++k) {
    mpq_class t = mpq_class(1, 2) + mpq_class(1, (1L << (k + 1)) * 2);
    GaussianRational zq = z_scale_q * GaussianRational(t);
    d.z_exact.push_back(zq);
    d.z_float.push_back(zq.to_complex());
  }

  // Shared fiber segment [-seg_half, seg_half] on the real axis.
  const GaussianRational seg_a = exact_from_double(-seg_half);
  const GaussianRational seg_b = exact_from_double(seg_half);

  const std::vector<mpq_class> params = dyadic_params(stars_per_slice);
  const double seg_len = 2.0 * seg_half;

  // Centers are shared across slices; min pairwise gap drives the ray caps.
  std::vector<double> centers(stars_per_slice);
  for (int i = 0; i < stars_per_slice; ++i)
    centers[i] = -seg_half + params[i].get_d() * seg_len;
  std::vector<double> min_gap(stars_per_slice, seg_len);
  for (int i = 0; i < stars_per_slice; ++i)
    for (int j = 0; j < stars_per_slice; ++j)
      if (i != j) min_gap[i] = std::min(min_gap[i], std::abs(centers[i] - centers[j]));

  RngStream geom_rng = RngStream::substream(seed, 0x57a25u);
  for (int k = 0; k < num_slices; ++k) {
    StaredSegment sl;
    sl.seg_a = seg_a;
    sl.seg_b = seg_b;
    sl.seg_a_f = seg_a.to_complex();
    sl.seg_b_f = seg_b.to_complex();

    const double slice_offset = geom_rng.uniform(0.0, M_PI);
    double bundle_cap = seg_half / 4.0;
    double bundle_max_seen = 0.0;
    for (int i = 0; i < stars_per_slice; ++i) {
      if (i > 0 && i % StaredSegment::kBundleSize == 0) {
        bundle_cap = bundle_max_seen / 10.0;
        bundle_max_seen = 0.0;
      }
      const double ray = std::min(0.4 * min_gap[i], bundle_cap);
      const int valence = (k + 1) + i * num_slices;  // partition of Z+ across slices
      ThickStar s = build_thick_star(Cplx(centers[i], 0.0), valence, ray, slice_offset);
      s.center_exact = seg_a + GaussianRational(params[i]) * (seg_b - seg_a);
      bundle_max_seen = std::max(bundle_max_seen, ray);
      sl.stars.push_back(std::move(s));
    }
    d.slices.push_back(std::move(sl));
  }

  d.verify();
  return d;
}

}  // namespace

CharacteristicDomain build_domain(double radius, int num_slices, int stars_per_slice,
                                  std::uint64_t seed_geometry) {
  return build_impl(CharacteristicDomain::RegionKind::Ball, radius, radius, num_slices,
                    stars_per_slice, seed_geometry);
}

CharacteristicDomain build_polydisk_domain(double rx, double ry, int num_slices,
                                           int stars_per_slice, std::uint64_t seed_geometry) {
  return build_impl(CharacteristicDomain::RegionKind::Polydisk, rx, ry, num_slices,
                    stars_per_slice, seed_geometry);
}

bool equality_witness(const PolyMapQ& f1, const PolyMapQ& f2, const CharacteristicDomain& d,
                      int degree_bound) {
  const int actual = std::max(f1.degree(), f2.degree());
  if (actual > degree_bound)
    throw std::invalid_argument("equality_witness: degree_bound " + std::to_string(degree_bound) +
                                " violated by a map of degree " + std::to_string(actual));
  const int grid = degree_bound + 1;
  if (static_cast<int>(d.z_exact.size()) < grid)
    throw std::invalid_argument("equality_witness: need " + std::to_string(grid) +
                                " distinct z_k, domain has " + std::to_string(d.z_exact.size()));
  if (d.slices.empty()) throw std::invalid_argument("equality_witness: domain has no slices");

  // Tensor grid {z_k} x {points of l}; agreement on it pins down any map of
  // per-variable degree <= degree_bound.
  const GaussianRational& a = d.slices.front().seg_a;
  const GaussianRational& b = d.slices.front().seg_b;
  for (int k = 0; k < grid; ++k) {
    const GaussianRational& z = d.z_exact[k];
    for (int j = 0; j < grid; ++j) {
      const GaussianRational t(mpq_class(2 * j + 1, 2 * grid));
      const GaussianRational w = a + t * (b - a);
      if (f1.eval(z, w) != f2.eval(z, w)) return false;
    }
  }
  return true;
}

// --- serialization ---

std::string domain_to_json_string(const CharacteristicDomain& d) {
  json j;
  j["region"] = d.region == CharacteristicDomain::RegionKind::Ball ? "ball" : "polydisk";
  if (d.region == CharacteristicDomain::RegionKind::Ball) {
    j["radius"] = d.ball_radius;
  } else {
    j["radius_x"] = d.radius_x;
    j["radius_y"] = d.radius_y;
  }
  j["slices"] = static_cast<int>(d.slices.size());
  j["stars_per_slice"] = d.truncation;
  j["geometry_seed"] = d.geometry_seed;
  json zs = json::array();
  for (const auto& z : d.z_exact) zs.push_back(json::array({z.re_str(), z.im_str()}));
  j["z_sequence"] = zs;
  json slices = json::array();
  for (const auto& sl : d.slices) {
    json js;
    js["segment"] = json::array({sl.seg_a.re_str(), sl.seg_b.re_str()});
    json stars = json::array();
    for (const auto& s : sl.stars)
      stars.push_back(json{{"t", GaussianRational::rational_str(s.center_exact.re())},
                           {"valence", s.valence},
                           {"ray", s.ray_length},
                           {"angle", s.angle_offset}});
    js["stars"] = stars;
    slices.push_back(js);
  }
  j["slice_detail"] = slices;
  return j.dump(2) + "\n";
}

CharacteristicDomain domain_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid domain JSON: ") + e.what());
  }
  try {
    const std::string kind = j.at("region").get<std::string>();
    const int num_slices = j.at("slices").get<int>();
    const int stars = j.at("stars_per_slice").get<int>();
    const std::uint64_t seed = j.at("geometry_seed").get<std::uint64_t>();
    // Domains are reconstructed from their build parameters; the serialized
    // star/z detail is descriptive output.
    if (kind == "ball") return build_domain(j.at("radius").get<double>(), num_slices, stars, seed);
    if (kind == "polydisk")
      return build_polydisk_domain(j.at("radius_x").get<double>(), j.at("radius_y").get<double>(),
                                   num_slices, stars, seed);
    throw ParseError("unknown region kind: " + kind);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad domain file: ") + e.what());
  }
}

CharacteristicDomain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open domain file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return domain_from_json_string(ss.str());
}

void save_domain(const CharacteristicDomain& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write domain file: " + path);
  out << domain_to_json_string(d);
}

}  // namespace keller
