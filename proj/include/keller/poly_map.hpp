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

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "keller/poly.hpp"

namespace keller {

/// A polynomial self-map of C^2: (X, Y) -> (P(X,Y), Q(X,Y)).
template <class S>
class PolyMap {
 public:
  PolyMap() : p_(BivarPoly<S>::var_x()), q_(BivarPoly<S>::var_y()), n_(1), m_(1) {}
  PolyMap(BivarPoly<S> p, BivarPoly<S> q)
      : p_(std::move(p)), q_(std::move(q)), n_(p_.degree()), m_(q_.degree()) {}

  static PolyMap identity() { return PolyMap(); }

  const BivarPoly<S>& p() const { return p_; }
  const BivarPoly<S>& q() const { return q_; }
  int deg_p() const { return n_; }
  int deg_q() const { return m_; }
  int degree() const { return std::max(n_, m_); }

  std::pair<S, S> eval(const S& x, const S& y) const {
    return {p_.eval(x, y), q_.eval(x, y)};
  }

  friend bool operator==(const PolyMap& a, const PolyMap& b) {
    return a.p_ == b.p_ && a.q_ == b.q_;
  }
  friend bool operator!=(const PolyMap& a, const PolyMap& b) { return !(a == b); }

  std::string str() const { return "(" + p_.str() + ",  " + q_.str() + ")"; }

 private:
  BivarPoly<S> p_, q_;
  int n_, m_;
};

using PolyMapQ = PolyMap<GaussianRational>;
using PolyMapC = PolyMap<std::complex<double>>;

/// f after g: (f ∘ g)(x, y) = f(g(x, y)).  Symbolic substitution; the result
/// degree is bounded by deg f * deg g.
template <class S>
PolyMap<S> compose(const PolyMap<S>& f, const PolyMap<S>& g) {
  BivarPoly<S> p = f.p().template substituted<BivarPoly<S>>(g.p(), g.q());
  BivarPoly<S> q = f.q().template substituted<BivarPoly<S>>(g.p(), g.q());
  return PolyMap<S>(std::move(p), std::move(q));
}

/// det J_f = P_X Q_Y - P_Y Q_X, exact in the exact instantiation.
template <class S>
BivarPoly<S> jacobian_det(const PolyMap<S>& f) {
  return f.p().derivative_x() * f.q().derivative_y() -
         f.p().derivative_y() * f.q().derivative_x();
}

/// Coefficient-wise exact comparison (term collections are canonical, so map
/// equality is polynomial-map equality).
inline bool equal_exact(const PolyMapQ& f, const PolyMapQ& g) { return f == g; }

inline PolyMapC to_float(const PolyMapQ& f) {
  return PolyMapC(to_float(f.p()), to_float(f.q()));
}

/// One factor of a composition chain, with its exact inverse when that is
/// known by construction (e.g. elementary shears).
struct ChainLink {
  PolyMapQ map;
  std::optional<PolyMapQ> inverse;
};

/// A map presented as a composition chain: value = links[0].map ∘
/// links[1].map ∘ ... (the last link is applied first).  Keeping the chain
/// unexpanded is what makes high-degree composites usable: evaluation walks
/// the links pointwise, and a link with a known inverse turns preimage
/// queries through that stage into a single evaluation instead of a fiber
/// solve.
struct MapChain {
  std::vector<ChainLink> links;

  MapChain() = default;
  explicit MapChain(PolyMapQ map) { links.push_back({std::move(map), std::nullopt}); }

  static MapChain invertible(PolyMapQ map, PolyMapQ inverse) {
    MapChain c;
    c.links.push_back({std::move(map), std::move(inverse)});
    return c;
  }

  bool fully_invertible() const {
    for (const ChainLink& l : links)
      if (!l.inverse) return false;
    return !links.empty();
  }

  /// Product of factor degrees: an upper bound for (and generically equal
  /// to) the degree of the expanded composite.
  long long degree_bound() const {
    long long d = 1;
    for (const ChainLink& l : links) d *= std::max(1, l.map.degree());
    return d;
  }

  std::pair<GaussianRational, GaussianRational> eval(GaussianRational x,
                                                     GaussianRational y) const {
    for (auto it = links.rbegin(); it != links.rend(); ++it) {
      auto [nx, ny] = it->map.eval(x, y);
      x = std::move(nx);
      y = std::move(ny);
    }
    return {x, y};
  }

  /// Expands the chain into a single PolyMap.  The result degree is the
  /// product of factor degrees; intended for small chains only.
  PolyMapQ expanded() const {
    PolyMapQ acc = PolyMapQ::identity();
    for (auto it = links.rbegin(); it != links.rend(); ++it) acc = compose(it->map, acc);
    return acc;
  }

  /// f ∘ g as chains: concatenation, preserving per-link inverses.
  friend MapChain compose(const MapChain& f, const MapChain& g) {
    MapChain r = f;
    r.links.insert(r.links.end(), g.links.begin(), g.links.end());
    return r;
  }
};

}  // namespace keller
