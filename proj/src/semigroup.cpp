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

#include "keller/semigroup.hpp"

#include <sstream>
#include <stdexcept>

namespace keller {

namespace {

GaussianRational small_nonzero(RngStream& rng, int bound = 3) {
  long long v = 0;
  while (v == 0) v = rng.int_in(-bound, bound);
  return GaussianRational(static_cast<int>(v));
}

/// p(Y) with integer coefficients, nonzero leading term, degree in
/// [min_deg, max_deg].
PolyQ random_univariate_in_y(RngStream& rng, int min_deg, int max_deg) {
  const int deg = static_cast<int>(rng.int_in(min_deg, max_deg));
  PolyQ p = PolyQ::monomial(0, deg, small_nonzero(rng));
  for (int k = 0; k < deg; ++k)
    if (rng.below(2) == 0) p.add_term(0, k, GaussianRational(static_cast<int>(rng.int_in(-3, 3))));
  return p;
}

bool is_prime_int(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

}  // namespace

MapChain random_shear(RngStream& rng, int min_p_degree, int max_p_degree) {
  PolyQ p = random_univariate_in_y(rng, min_p_degree, max_p_degree);
  // forward: (Y, -X + p(Y))
  PolyQ fwd_q = -PolyQ::var_x();
  for (const auto& [e, c] : p.terms()) fwd_q.add_term(0, e.second, c);
  PolyMapQ fwd(PolyQ::var_y(), std::move(fwd_q));
  // inverse: (p(X) - Y, X)
  PolyQ inv_p = -PolyQ::var_y();
  for (const auto& [e, c] : p.terms()) inv_p.add_term(e.second, 0, c);
  PolyMapQ inv(std::move(inv_p), PolyQ::var_x());
  return MapChain::invertible(std::move(fwd), std::move(inv));
}

MapChain random_automorphism(RngStream& rng, int max_total_degree) {
  MapChain chain = random_shear(rng);
  while (rng.below(3) != 0) {
    MapChain next;
    if (rng.below(4) == 0) {
      // translation (X + a, Y + b) with inverse (X - a, Y - b)
      const GaussianRational a = small_nonzero(rng);
      const GaussianRational b = small_nonzero(rng);
      next = MapChain::invertible(
          PolyMapQ(PolyQ::var_x() + PolyQ(a), PolyQ::var_y() + PolyQ(b)),
          PolyMapQ(PolyQ::var_x() - PolyQ(a), PolyQ::var_y() - PolyQ(b)));
    } else {
      next = random_shear(rng);
    }
    if (chain.degree_bound() * next.degree_bound() > max_total_degree) break;
    chain = compose(chain, next);
  }
  return chain;
}

MapChain random_metric_automorphism(RngStream& rng) {
  auto quad_shear = [&] {
    PolyQ p = PolyQ::monomial(0, 2, small_nonzero(rng, 2));
    if (rng.below(2) == 0) p.add_term(0, 1, GaussianRational(static_cast<int>(rng.int_in(-2, 2))));
    if (rng.below(2) == 0) p.add_term(0, 0, GaussianRational(static_cast<int>(rng.int_in(-2, 2))));
    PolyQ fwd_q = -PolyQ::var_x();
    for (const auto& [e, c] : p.terms()) fwd_q.add_term(0, e.second, c);
    PolyQ inv_p = -PolyQ::var_y();
    for (const auto& [e, c] : p.terms()) inv_p.add_term(e.second, 0, c);
    return MapChain::invertible(PolyMapQ(PolyQ::var_y(), std::move(fwd_q)),
                                PolyMapQ(std::move(inv_p), PolyQ::var_x()));
  };
  MapChain chain = quad_shear();
  if (rng.below(2) == 0) {
    const GaussianRational a = small_nonzero(rng, 2);
    const GaussianRational b = small_nonzero(rng, 2);
    chain = compose(chain, MapChain::invertible(
                               PolyMapQ(PolyQ::var_x() + PolyQ(a), PolyQ::var_y() + PolyQ(b)),
                               PolyMapQ(PolyQ::var_x() - PolyQ(a), PolyQ::var_y() - PolyQ(b))));
  }
  if (rng.below(2) == 0) chain = compose(chain, quad_shear());
  return chain;
}

PolyMapQ random_sparse_map(RngStream& rng, int degree, int extra_terms) {
  auto component = [&](RngStream& r) {
    // One term of exact total degree, then a few lower-order terms.
    const int i_top = static_cast<int>(r.below(static_cast<std::uint64_t>(degree + 1)));
    PolyQ p = PolyQ::monomial(i_top, degree - i_top, small_nonzero(r));
    for (int t = 0; t < extra_terms; ++t) {
      const int d = static_cast<int>(r.below(static_cast<std::uint64_t>(degree + 1)));
      const int i = static_cast<int>(r.below(static_cast<std::uint64_t>(d + 1)));
      p.add_term(i, d - i, GaussianRational(static_cast<int>(r.int_in(-3, 3))));
    }
    if (p.is_constant()) p.add_term(1, 0, GaussianRational(1));
    return p;
  };
  return PolyMapQ(component(rng), component(rng));
}

MapChain power_map(int a, int b) {
  if (a < 1 || b < 1) throw std::invalid_argument("power_map: exponents must be >= 1");
  PolyMapQ m(PolyQ::monomial(a, 0, GaussianRational(1)),
             PolyQ::monomial(0, b, GaussianRational(1)));
  if (a == 1 && b == 1) return MapChain::invertible(m, PolyMapQ::identity());
  return MapChain(std::move(m));
}

namespace {

OperatorProbe run_probe(const PolyMapQ& f, OperatorSide side, int trials, std::uint64_t seed) {
  OperatorProbe probe;
  probe.f = f;
  probe.side = side;
  for (int t = 0; t < trials; ++t) {
    RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(t));
    PolyMapQ g = random_sparse_map(rng, 1 + static_cast<int>(rng.below(3)));
    PolyMapQ h = random_sparse_map(rng, 1 + static_cast<int>(rng.below(3)));
    while (equal_exact(g, h)) h = random_sparse_map(rng, 1 + static_cast<int>(rng.below(3)));

    const PolyMapQ cg = side == OperatorSide::Right ? compose(g, f) : compose(f, g);
    const PolyMapQ ch = side == OperatorSide::Right ? compose(h, f) : compose(f, h);
    const bool distinct = !equal_exact(cg, ch);
    probe.trial_pairs.emplace_back(std::move(g), std::move(h));
    probe.verdicts.push_back(distinct);

    if (!distinct && side == OperatorSide::Left) {
      // A collision would contradict injectivity; record whether the pair
      // agrees anywhere on a sample grid (predicted: nowhere).
      const auto& [gg, hh] = probe.trial_pairs.back();
      for (int ix = -3; ix <= 3; ++ix)
        for (int iy = -3; iy <= 3; ++iy) {
          const GaussianRational x(ix), y(iy);
          if (gg.eval(x, y) == hh.eval(x, y)) {
            std::ostringstream os;
            os << "colliding pair agrees at (" << ix << ", " << iy << ")";
            probe.collision_notes.push_back(os.str());
          }
        }
    }
  }
  return probe;
}

}  // namespace

OperatorProbe right_injectivity_probe(const PolyMapQ& f, int trials, std::uint64_t seed) {
  return run_probe(f, OperatorSide::Right, trials, seed);
}

OperatorProbe left_injectivity_probe(const PolyMapQ& f, int trials, std::uint64_t seed) {
  return run_probe(f, OperatorSide::Left, trials, seed);
}

PrimalityReport primality_classify(const MapChain& f, std::uint64_t seed, DegreeOptions opts) {
  PrimalityReport rep;
  rep.degree = geometric_degree(f, seed, opts);
  if (!rep.degree.confident)
    throw std::runtime_error("primality_classify: degree estimate not confident");
  if (rep.degree.d <= 1)
    rep.classification = PrimalityClass::Unit;
  else if (is_prime_int(rep.degree.d))
    rep.classification = PrimalityClass::PrimeDegree;
  else
    rep.classification = PrimalityClass::CompositeDegree;
  return rep;
}

PolyMapQ iterate_map(const PolyMapQ& f, int n, long long degree_cap) {
  if (n < 1) throw std::invalid_argument("iterate_map: n must be >= 1");
  const long long d = std::max(1, f.degree());
  long long needed = 1;
  for (int k = 0; k < n; ++k) {
    needed *= d;
    if (needed > degree_cap)
      throw std::runtime_error("iterate_map: degree bound " + std::to_string(needed) +
                               " exceeds cap " + std::to_string(degree_cap) +
                               "; rerun with a cap of at least " + std::to_string(needed));
  }
  PolyMapQ acc = f;
  for (int k = 1; k < n; ++k) acc = compose(f, acc);
  return acc;
}

BnReport bn_sampler(const MapChain& f, int grid_side, FiberTolerances tol) {
  if (grid_side < 2) throw std::invalid_argument("bn_sampler: grid_side must be >= 2");
  ChainSolver solver(f, tol);

  BnReport rep;
  // Complex offsets keep the grid clear of the coordinate axes, which carry
  // the non-generic targets of the power-map family.
  const Cplx base_a(-1.3, 0.137), base_b(-1.1, 0.291);
  const double step = 2.6 / (grid_side - 1);
  for (int s = 0; s < grid_side; ++s)
    for (int t = 0; t < grid_side; ++t) {
      const C2 target = {base_a + Cplx(step * s, 0.0), base_b + Cplx(step * t, 0.0)};
      const int count = static_cast<int>(solver.preimages(target).size());
      rep.histogram[count] += 1;
      ++rep.samples;
    }

  rep.d = rep.histogram.empty() ? 0 : rep.histogram.rbegin()->first;
  rep.cumulative.assign(rep.d + 1, 0);
  long running = 0;
  for (int n = 0; n <= rep.d; ++n) {
    auto it = rep.histogram.find(n);
    if (it != rep.histogram.end()) running += it->second;
    rep.cumulative[n] = running;
  }
  rep.nesting_ok = true;
  for (int n = 0; n + 1 <= rep.d; ++n)
    if (rep.cumulative[n] > rep.cumulative[n + 1]) rep.nesting_ok = false;
  rep.top_fraction = rep.samples > 0 && rep.histogram.count(rep.d)
                         ? static_cast<double>(rep.histogram.at(rep.d)) / rep.samples
                         : 0.0;
  rep.dense_ok = rep.top_fraction >= 0.8;
  return rep;
}

}  // namespace keller
