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

#include "keller/metric.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

namespace keller {

namespace {

constexpr long kShardSize = 8192;
constexpr int kMaxResampleAttempts = 64;

double norm2(C2 p) { return std::sqrt(std::norm(p.first) + std::norm(p.second)); }

/// Keeps the mantissa of each coordinate to 24 bits.  Samples stay uniform on
/// a fine dyadic lattice and the exact-rational membership orbits downstream
/// keep small numerators.
double quantize24(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  int e = 0;
  const double m = std::frexp(x, &e);
  return std::ldexp(std::round(std::ldexp(m, 24)), e - 24);
}

C2 quantize24(C2 z) {
  return {Cplx(quantize24(z.first.real()), quantize24(z.first.imag())),
          Cplx(quantize24(z.second.real()), quantize24(z.second.imag()))};
}

/// Draws a 24-bit-dyadic sample from D (quantized draws are re-validated).
C2 draw_sample(const CharacteristicDomain& d, RngStream& rng) {
  for (;;) {
    const C2 z = quantize24(d.sample(rng));
    if (d.contains(z.first, z.second)) return z;
  }
}

using GR = GaussianRational;

struct ExactPoint {
  GR x, y;
};

// --- error-tracked double evaluation -------------------------------------------

Cplx eval_poly_c(const PolyC& p, Cplx x, Cplx y) {
  int mi = 0, mj = 0;
  for (const auto& [e, c] : p.terms()) {
    mi = std::max(mi, e.first);
    mj = std::max(mj, e.second);
  }
  std::vector<Cplx> xp(mi + 1), yp(mj + 1);
  xp[0] = yp[0] = 1.0;
  for (int k = 1; k <= mi; ++k) xp[k] = xp[k - 1] * x;
  for (int k = 1; k <= mj; ++k) yp[k] = yp[k - 1] * y;
  Cplx acc = 0.0;
  for (const auto& [e, c] : p.terms()) acc += c * xp[e.first] * yp[e.second];
  return acc;
}

PolyC magnitude_poly(const PolyC& p) {
  PolyC m;
  for (const auto& [e, c] : p.terms()) m.add_term(e.first, e.second, Cplx(std::abs(c), 0.0));
  return m;
}

struct ErrPoint {
  C2 v;
  double err = 0.0;  // absolute error bound, per component
};

/// One chain link with first-order error propagation: rounding eps * |P|(a)
/// plus the input error amplified by the partial-derivative magnitudes.
struct TrackedLink {
  PolyMapC map;
  PolyC mag_p, mag_q, mag_px, mag_py, mag_qx, mag_qy;

  explicit TrackedLink(const PolyMapQ& f) : map(to_float(f)) {
    mag_p = magnitude_poly(map.p());
    mag_q = magnitude_poly(map.q());
    mag_px = magnitude_poly(map.p().derivative_x());
    mag_py = magnitude_poly(map.p().derivative_y());
    mag_qx = magnitude_poly(map.q().derivative_x());
    mag_qy = magnitude_poly(map.q().derivative_y());
  }

  ErrPoint apply(const ErrPoint& in) const {
    static constexpr double kEps = 32.0 * 2.220446049250313e-16;
    const Cplx ax(std::abs(in.v.first) + in.err, 0.0);
    const Cplx ay(std::abs(in.v.second) + in.err, 0.0);
    ErrPoint out;
    out.v = {eval_poly_c(map.p(), in.v.first, in.v.second),
             eval_poly_c(map.q(), in.v.first, in.v.second)};
    const double ep = kEps * std::abs(eval_poly_c(mag_p, ax, ay)) +
                      in.err * (std::abs(eval_poly_c(mag_px, ax, ay)) +
                                std::abs(eval_poly_c(mag_py, ax, ay)));
    const double eq = kEps * std::abs(eval_poly_c(mag_q, ax, ay)) +
                      in.err * (std::abs(eval_poly_c(mag_qx, ax, ay)) +
                                std::abs(eval_poly_c(mag_qy, ax, ay)));
    out.err = std::max(ep, eq);
    if (!std::isfinite(out.err)) out.err = 1e300;
    return out;
  }
};

// --- exact domain membership -------------------------------------------------

/// Exact mirrors of the region bounds and star geometry, for membership
/// queries on exact rational points.  Open-region semantics match
/// CharacteristicDomain::contains.
class ExactDomain {
 public:
  explicit ExactDomain(const CharacteristicDomain& d) : d_(&d) {
    if (d.region == CharacteristicDomain::RegionKind::Ball) {
      const mpq_class r = exact_from_double(d.ball_radius).re();
      r2_ = r * r;
    } else {
      const mpq_class rx = exact_from_double(d.radius_x).re();
      const mpq_class ry = exact_from_double(d.radius_y).re();
      rx2_ = rx * rx;
      ry2_ = ry * ry;
    }
  }

  bool contains(const ExactPoint& p) const {
    if (d_->region == CharacteristicDomain::RegionKind::Ball) {
      if (p.x.norm_sq() + p.y.norm_sq() >= r2_) return false;
    } else {
      if (p.x.norm_sq() >= rx2_ || p.y.norm_sq() >= ry2_) return false;
    }
    for (std::size_t k = 0; k < d_->z_exact.size(); ++k)
      if (p.x == d_->z_exact[k]) return !slice_contains(d_->slices[k], p.y);
    return true;
  }

 private:
  static mpq_class cross(const GR& u, const GR& v) { return u.re() * v.im() - u.im() * v.re(); }
  static mpq_class dot(const GR& u, const GR& v) { return u.re() * v.re() + u.im() * v.im(); }

  static bool on_segment(const StaredSegment& sl, const GR& w) {
    const GR dvec = sl.seg_b - sl.seg_a;
    const GR r = w - sl.seg_a;
    if (cross(dvec, r) != 0) return false;
    const mpq_class t = dot(dvec, r);
    return t >= 0 && t <= dot(dvec, dvec);
  }

  static bool in_triangle(const Triangle& t, const GR& w) {
    const GR a = exact_from_double(t.a.real(), t.a.imag());
    const GR b = exact_from_double(t.b.real(), t.b.imag());
    const GR c = exact_from_double(t.c.real(), t.c.imag());
    const mpq_class s1 = cross(b - a, w - a);
    const mpq_class s2 = cross(c - b, w - b);
    const mpq_class s3 = cross(a - c, w - c);
    return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
  }

  static bool slice_contains(const StaredSegment& sl, const GR& w) {
    if (on_segment(sl, w)) return true;
    for (const ThickStar& s : sl.stars)
      for (const Triangle& t : s.triangles)
        if (in_triangle(t, w)) return true;
    return false;
  }

  const CharacteristicDomain* d_;
  mpq_class r2_, rx2_, ry2_;
};

// --- per-chain evaluation pipeline ---------------------------------------------

/// One side of a rho computation.  Fully invertible chains run exact
/// arithmetic end to end (inverse orbits collapse back to small canonical
/// rationals, and float cancellation in p(u) - v at large |u| would otherwise
/// destroy the membership bit); other chains fall back to per-factor fiber
/// solving with boundary margins.
class Pipeline {
 public:
  Pipeline(const MapChain& chain, const CharacteristicDomain& d, const FiberTolerances& tol)
      : domain_(&d), exact_domain_(d), solver_(chain, tol), cluster_rel_(tol.cluster_rel) {
    exact_ = true;
    for (const ChainLink& l : chain.links) {
      if (!l.inverse) {
        exact_ = false;
        break;
      }
    }
    if (exact_) {
      forward_ = chain.links;
      for (const ChainLink& l : chain.links) tracked_fwd_.emplace_back(l.map);
      for (const ChainLink& l : chain.links) tracked_inv_.emplace_back(*l.inverse);
      // Invertible chains have constant Jacobians; the multiplicity weight
      // is a constant too.
      GaussianRational det(1);
      for (const ChainLink& l : chain.links) {
        const PolyQ dj = jacobian_det(l.map);
        if (!dj.is_constant()) throw std::logic_error("invertible link with non-constant det J");
        det *= dj.constant_value();
      }
      weight_ = std::norm(det.to_complex());
    }
  }

  bool exact() const { return exact_; }
  const ChainSolver& solver() const { return solver_; }

  ExactPoint eval_exact(const ExactPoint& z) const {
    ExactPoint p = z;
    for (auto it = forward_.rbegin(); it != forward_.rend(); ++it) {
      auto [nx, ny] = it->map.eval(p.x, p.y);
      p = {std::move(nx), std::move(ny)};
    }
    return p;
  }

  /// Exact preimage of an exact point (chains are invertible here).
  ExactPoint preimage_exact(const ExactPoint& w) const {
    ExactPoint p = w;
    for (const ChainLink& l : forward_) {
      auto [nx, ny] = l.inverse->eval(p.x, p.y);
      p = {std::move(nx), std::move(ny)};
    }
    return p;
  }

  /// Exact membership: is w in (this chain)(D)?
  bool image_contains_exact(const ExactPoint& w) const {
    return exact_domain_.contains(preimage_exact(w));
  }

  /// Error-tracked double preimage (valid only on exact pipelines).
  ErrPoint preimage_tracked(ErrPoint w) const {
    for (const TrackedLink& l : tracked_inv_) w = l.apply(w);
    return w;
  }
  ErrPoint eval_tracked(ErrPoint z) const {
    for (auto it = tracked_fwd_.rbegin(); it != tracked_fwd_.rend(); ++it) z = it->apply(z);
    return z;
  }

  /// Certified membership decision from an error-tracked preimage; nullopt
  /// when the point sits too close to a decision boundary for double
  /// precision.
  std::optional<bool> decide_from_tracked(const ErrPoint& u) const {
    const double margin = u.err + 1e-13;
    double signed_dist;
    if (domain_->region == CharacteristicDomain::RegionKind::Ball) {
      signed_dist = std::sqrt(std::norm(u.v.first) + std::norm(u.v.second)) -
                    domain_->ball_radius;
    } else {
      signed_dist = std::max(std::abs(u.v.first) - domain_->radius_x,
                             std::abs(u.v.second) - domain_->radius_y);
    }
    if (std::abs(signed_dist) <= margin) return std::nullopt;
    if (signed_dist > 0.0) return false;
    // Inside the region; certify that the first coordinate misses every
    // slice (E lives on {x == z_k} exactly).
    for (const Cplx& zk : domain_->z_float)
      if (std::abs(u.v.first - zk) <= margin) return std::nullopt;
    return true;
  }

  double weight(C2 z) const { return exact_ ? weight_ : solver_.jacobian_weight(z); }

  C2 eval_float(C2 z) const { return solver_.eval(z); }

  const CharacteristicDomain& domain() const { return *domain_; }
  double cluster_rel() const { return cluster_rel_; }

 private:
  const CharacteristicDomain* domain_;
  ExactDomain exact_domain_;
  ChainSolver solver_;
  std::vector<ChainLink> forward_;
  std::vector<TrackedLink> tracked_fwd_, tracked_inv_;
  bool exact_ = false;
  double weight_ = 1.0;
  double cluster_rel_;
};

enum class Membership { In, Out, Ambiguous };

/// Fiber-route membership with a boundary margin (used when the queried
/// chain is not fully invertible).
Membership fiber_membership(const ChainSolver& g, C2 w, const CharacteristicDomain& d,
                            double cluster_rel) {
  bool boundary_seen = false;
  for (C2 p : g.preimages(w)) {
    const double tol = cluster_rel * (1.0 + norm2(p));
    switch (d.classify(p.first, p.second, tol)) {
      case CharacteristicDomain::Location::Inside:
        if (!d.in_exceptional_set(p.first, p.second)) return Membership::In;
        break;  // on E: not in D, keep scanning
      case CharacteristicDomain::Location::Boundary:
        boundary_seen = true;
        break;
      case CharacteristicDomain::Location::Outside:
        break;
    }
  }
  return boundary_seen ? Membership::Ambiguous : Membership::Out;
}

ExactPoint lift(C2 z) {
  return {exact_from_double(z.first.real(), z.first.imag()),
          exact_from_double(z.second.real(), z.second.imag())};
}

/// Membership of an error-free query point in the image of an invertible
/// chain: certified double first, exact fallback.
Membership invertible_membership(const Pipeline& member, C2 w) {
  const ErrPoint u = member.preimage_tracked(ErrPoint{w, 0.0});
  if (auto decided = member.decide_from_tracked(u))
    return *decided ? Membership::In : Membership::Out;
  return member.image_contains_exact(lift(w)) ? Membership::In : Membership::Out;
}

/// Is (fwd chain)(z) inside (member chain)(D)?  Certified/exact when the
/// membership chain inverts; Ambiguous only on the fiber route.
Membership cross_membership(const Pipeline& fwd, const Pipeline& member, C2 z) {
  if (fwd.exact() && member.exact()) {
    // Double pass with error bounds first; exact rationals only when the
    // preimage lands inside the uncertainty band of a decision boundary.
    const ErrPoint u = member.preimage_tracked(fwd.eval_tracked(ErrPoint{z, 0.0}));
    if (auto decided = member.decide_from_tracked(u))
      return *decided ? Membership::In : Membership::Out;
    const ExactPoint w = fwd.eval_exact(lift(z));
    return member.image_contains_exact(w) ? Membership::In : Membership::Out;
  }
  const C2 w = fwd.eval_float(z);
  if (member.exact())
    return member.image_contains_exact(lift(w)) ? Membership::In : Membership::Out;
  return fiber_membership(member.solver(), w, member.domain(), member.cluster_rel());
}

// --- sharded accumulation -------------------------------------------------------

struct ShardSums {
  double sum_t = 0.0, sum_t2 = 0.0;
  double sum_a = 0.0, sum_b = 0.0;
  long used = 0, discarded = 0, resampled = 0;
  double box_lo[4] = {0, 0, 0, 0}, box_hi[4] = {0, 0, 0, 0};
  bool box_init = false;

  void note_point(C2 w) {
    const double v[4] = {w.first.real(), w.first.imag(), w.second.real(), w.second.imag()};
    if (!box_init) {
      std::memcpy(box_lo, v, sizeof v);
      std::memcpy(box_hi, v, sizeof v);
      box_init = true;
      return;
    }
    for (int k = 0; k < 4; ++k) {
      box_lo[k] = std::min(box_lo[k], v[k]);
      box_hi[k] = std::max(box_hi[k], v[k]);
    }
  }
};

/// Runs `body(rng, sums, count)` over ceil(n / kShardSize) shards with
/// per-shard substreams, in parallel; shard results are combined in shard
/// order, so output is independent of the worker count.
template <class Body>
std::vector<ShardSums> run_sharded(long n, std::uint64_t seed, std::uint64_t tag, int threads,
                                   Body&& body) {
  const long nshards = (n + kShardSize - 1) / kShardSize;
  std::vector<ShardSums> results(static_cast<std::size_t>(nshards));

  int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, 64));
  nthreads = static_cast<int>(std::min<long>(nthreads, nshards));

  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    try {
      for (;;) {
        const long s = next.fetch_add(1);
        if (s >= nshards) return;
        const long count = std::min(kShardSize, n - s * kShardSize);
        RngStream rng = RngStream::substream(seed, tag ^ (0x9d5f + static_cast<std::uint64_t>(s)));
        body(rng, results[static_cast<std::size_t>(s)], count);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  };

  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

struct Combined {
  double sum_t = 0.0, sum_t2 = 0.0, sum_a = 0.0, sum_b = 0.0;
  long used = 0, discarded = 0, resampled = 0;
  double box_lo[4] = {0, 0, 0, 0}, box_hi[4] = {0, 0, 0, 0};
  bool box_init = false;

  double mean() const { return used > 0 ? sum_t / static_cast<double>(used) : 0.0; }
  double std_error() const {
    if (used < 2) return 0.0;
    const double n = static_cast<double>(used);
    double var = (sum_t2 - n * mean() * mean()) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / n);
  }
};

Combined combine(const std::vector<ShardSums>& shards) {
  Combined c;
  for (const ShardSums& s : shards) {
    c.sum_t += s.sum_t;
    c.sum_t2 += s.sum_t2;
    c.sum_a += s.sum_a;
    c.sum_b += s.sum_b;
    c.used += s.used;
    c.discarded += s.discarded;
    c.resampled += s.resampled;
    if (!s.box_init) continue;
    if (!c.box_init) {
      std::memcpy(c.box_lo, s.box_lo, sizeof s.box_lo);
      std::memcpy(c.box_hi, s.box_hi, sizeof s.box_hi);
      c.box_init = true;
    } else {
      for (int k = 0; k < 4; ++k) {
        c.box_lo[k] = std::min(c.box_lo[k], s.box_lo[k]);
        c.box_hi[k] = std::max(c.box_hi[k], s.box_hi[k]);
      }
    }
  }
  return c;
}

void check_discard_budget(const Combined& c, long n) {
  if (c.discarded * 100 > n)
    throw DegenerateOverflowError("more than 1% of samples discarded (" +
                                  std::to_string(c.discarded) + " of " + std::to_string(n) + ")");
}

}  // namespace

MetricEstimate rho(const MapChain& g1, const MapChain& g2, const CharacteristicDomain& d,
                   const McOptions& opts) {
  if (opts.samples < 1) throw std::invalid_argument("rho: samples must be positive");
  const Pipeline p1(g1, d, opts.tol);
  const Pipeline p2(g2, d, opts.tol);

  auto shards = run_sharded(
      opts.samples, opts.seed, 0x52484f /*RHO*/, opts.threads,
      [&](RngStream& rng, ShardSums& out, long count) {
        for (long i = 0; i < count; ++i) {
          bool accepted = false;
          for (int attempt = 0; attempt < kMaxResampleAttempts && !accepted; ++attempt) {
            const C2 z = draw_sample(d, rng);
            double t1 = 0.0, t2 = 0.0;
            try {
              const Membership m1 = cross_membership(p1, p2, z);
              const Membership m2 = cross_membership(p2, p1, z);
              if (m1 == Membership::Ambiguous || m2 == Membership::Ambiguous) {
                ++out.resampled;
                continue;
              }
              if (m1 == Membership::Out) t1 = p1.weight(z);
              if (m2 == Membership::Out) t2 = p2.weight(z);
            } catch (const DegenerateFiberError&) {
              ++out.discarded;
              break;
            }
            const double t = t1 + t2;
            out.sum_t += t;
            out.sum_t2 += t * t;
            out.sum_a += t1;
            out.sum_b += t2;
            ++out.used;
            accepted = true;
          }
        }
      });

  const Combined c = combine(shards);
  check_discard_budget(c, opts.samples);

  MetricEstimate est;
  est.samples = opts.samples;
  est.seed = opts.seed;
  est.discarded = c.discarded;
  est.resampled = c.resampled;
  const double vol = d.volume();
  est.std_error = vol * c.std_error();
  est.g1_side = c.used > 0 ? vol * c.sum_a / static_cast<double>(c.used) : 0.0;
  est.g2_side = c.used > 0 ? vol * c.sum_b / static_cast<double>(c.used) : 0.0;
  est.value = est.g1_side + est.g2_side;  // the decomposition is exact
  return est;
}

MetricEstimate rho(const PolyMapQ& g1, const PolyMapQ& g2, const CharacteristicDomain& d,
                   const McOptions& opts) {
  return rho(MapChain(g1), MapChain(g2), d, opts);
}

VolumeReport mult_volume(const MapChain& g, const CharacteristicDomain& d,
                         const McOptions& opts) {
  if (opts.samples < 10000)
    throw std::invalid_argument("mult_volume: needs at least 10^4 samples");
  const Pipeline pipe(g, d, opts.tol);

  // Pass 1: source-space |det J|^2 integral; also collects the image box.
  auto pass1 = run_sharded(opts.samples, opts.seed, 0x564f4c /*VOL*/, opts.threads,
                           [&](RngStream& rng, ShardSums& out, long count) {
                             for (long i = 0; i < count; ++i) {
                               const C2 z = draw_sample(d, rng);
                               const double w = pipe.weight(z);
                               out.sum_t += w;
                               out.sum_t2 += w * w;
                               ++out.used;
                               out.note_point(pipe.eval_float(z));
                             }
                           });
  const Combined c1 = combine(pass1);

  VolumeReport rep;
  rep.samples = opts.samples;
  rep.seed = opts.seed;
  const double vol = d.volume();
  rep.mult_vol = vol * c1.mean();
  rep.mult_std_error = vol * c1.std_error();

  // Pass 2: plain image volume by membership sampling over the padded box.
  double lo[4], hi[4];
  for (int k = 0; k < 4; ++k) {
    const double pad = 0.05 * (c1.box_hi[k] - c1.box_lo[k]) + 1e-9;
    lo[k] = c1.box_lo[k] - pad;
    hi[k] = c1.box_hi[k] + pad;
  }
  double box_vol = 1.0;
  for (int k = 0; k < 4; ++k) box_vol *= hi[k] - lo[k];

  auto pass2 = run_sharded(
      opts.samples, opts.seed, 0x47454f /*GEO*/, opts.threads,
      [&](RngStream& rng, ShardSums& out, long count) {
        for (long i = 0; i < count; ++i) {
          bool accepted = false;
          for (int attempt = 0; attempt < kMaxResampleAttempts && !accepted; ++attempt) {
            const C2 w =
                quantize24({Cplx(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1])),
                            Cplx(rng.uniform(lo[2], hi[2]), rng.uniform(lo[3], hi[3]))});
            try {
              Membership m;
              if (pipe.exact()) {
                m = invertible_membership(pipe, w);
              } else {
                m = fiber_membership(pipe.solver(), w, d, opts.tol.cluster_rel);
              }
              if (m == Membership::Ambiguous) {
                ++out.resampled;
                continue;
              }
              const double ind = (m == Membership::In) ? 1.0 : 0.0;
              out.sum_t += ind;
              out.sum_t2 += ind;
              ++out.used;
              accepted = true;
            } catch (const DegenerateFiberError&) {
              ++out.discarded;
              break;
            }
          }
        }
      });
  const Combined c2 = combine(pass2);
  check_discard_budget(c2, opts.samples);

  rep.discarded = c2.discarded;
  rep.geometric_vol = box_vol * c2.mean();
  rep.geometric_std_error = box_vol * c2.std_error();
  rep.excess = rep.mult_vol - rep.geometric_vol;
  return rep;
}

VolumeReport mult_volume(const PolyMapQ& g, const CharacteristicDomain& d,
                         const McOptions& opts) {
  return mult_volume(MapChain(g), d, opts);
}

namespace {

bool chain_is_volume_preserving(const MapChain& f) {
  GaussianRational det_product(1);
  for (const ChainLink& l : f.links) {
    const PolyQ det = jacobian_det(l.map);
    if (!det.is_constant()) return false;
    det_product *= det.constant_value();
  }
  return det_product == GaussianRational(1);
}

}  // namespace

ContractionReport contraction_experiment(const MapChain& f, const MapChain& g1,
                                         const MapChain& g2, const CharacteristicDomain& d,
                                         const McOptions& opts, int degree_targets) {
  ContractionReport rep;
  rep.lhs = rho(compose(f, g1), compose(f, g2), d, opts);
  rep.rhs = rho(g1, g2, d, opts);
  rep.ratio = rep.rhs.value > 0.0 ? rep.lhs.value / rep.rhs.value : 0.0;
  rep.slack = 3.0 * std::sqrt(rep.lhs.std_error * rep.lhs.std_error +
                              rep.rhs.std_error * rep.rhs.std_error);

  if (chain_is_volume_preserving(f)) {
    rep.mode = ContractionReport::Mode::Inequality;
    rep.holds = rep.lhs.value <= rep.rhs.value + rep.slack;
  } else {
    rep.mode = ContractionReport::Mode::Containment;
    const Pipeline pf(f, d, opts.tol);
    const Pipeline p1(g1, d, opts.tol), p2(g2, d, opts.tol);
    const Pipeline h1(compose(f, g1), d, opts.tol), h2(compose(f, g2), d, opts.tol);
    const long n = std::min<long>(opts.samples, 20000);
    RngStream rng = RngStream::substream(opts.seed, 0xc017a1u);
    // Sample side: y = Ga(z) lies in Ga(D) and x = F(y) in (F∘Ga)(D); if x
    // avoids (F∘Gb)(D) then y must avoid Gb(D).
    auto check_side = [&](const Pipeline& ga, const Pipeline& gb, const Pipeline& hb, C2 z) {
      const C2 y = ga.eval_float(z);
      const C2 x = pf.eval_float(y);
      Membership outer;
      if (hb.exact()) {
        outer = invertible_membership(hb, x);
      } else {
        outer = fiber_membership(hb.solver(), x, d, opts.tol.cluster_rel);
      }
      if (outer == Membership::Ambiguous) {
        ++rep.containment_ambiguous;
        return;
      }
      if (outer == Membership::Out) {
        Membership inner;
        if (gb.exact()) {
          inner = invertible_membership(gb, y);
        } else {
          inner = fiber_membership(gb.solver(), y, d, opts.tol.cluster_rel);
        }
        if (inner == Membership::In) ++rep.containment_violations;
        if (inner == Membership::Ambiguous) ++rep.containment_ambiguous;
      }
    };
    for (long i = 0; i < n; ++i) {
      const C2 z = draw_sample(d, rng);
      ++rep.containment_samples;
      try {
        check_side(p1, p2, h2, z);
        check_side(p2, p1, h1, z);
      } catch (const DegenerateFiberError&) {
        ++rep.containment_ambiguous;
      }
    }
    rep.holds = rep.containment_violations == 0;
  }

  DegreeOptions dopts;
  dopts.k_targets = degree_targets;
  dopts.tol = opts.tol;
  rep.f_degree = geometric_degree(f, opts.seed ^ 0xdeull, dopts);
  return rep;
}

BoundsReport volume_bounds_check(const MapChain& f, const CharacteristicDomain& region,
                                 const McOptions& opts, int degree_targets) {
  // Determinant condition: every factor must have a constant Jacobian and the
  // product must be exactly 1.
  GaussianRational det_product(1);
  for (const ChainLink& l : f.links) {
    const PolyQ det = jacobian_det(l.map);
    if (!det.is_constant())
      throw std::invalid_argument("volume_bounds_check: factor with non-constant det J");
    det_product *= det.constant_value();
  }
  if (det_product != GaussianRational(1))
    throw std::invalid_argument("volume_bounds_check: det J != 1, map is not volume preserving");

  VolumeReport vr = mult_volume(f, region, opts);

  BoundsReport rep;
  rep.region_vol = region.volume();
  rep.image_vol = vr.geometric_vol;
  rep.image_std_error = vr.geometric_std_error;
  rep.discarded = vr.discarded;

  DegreeOptions dopts;
  dopts.k_targets = degree_targets;
  dopts.tol = opts.tol;
  rep.f_degree = geometric_degree(f, opts.seed ^ 0xdfull, dopts);

  const double sigma3 = 3.0 * rep.image_std_error;
  rep.upper_ok = rep.image_vol <= rep.region_vol + sigma3;
  const double df = std::max(1, rep.f_degree.d);
  rep.lower_ok = rep.region_vol <= df * rep.image_vol + df * sigma3;
  return rep;
}

}  // namespace keller
