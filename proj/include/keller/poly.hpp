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

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "keller/rational.hpp"

namespace keller {

/// Exponent pair (i, j) for X^i Y^j.
using Exp2 = std::pair<int, int>;

/// Sparse bivariate polynomial in X, Y over scalar S (exact GaussianRational
/// or std::complex<double>).  Invariant: no stored zero coefficient, all
/// exponents nonnegative.
template <class S>
class BivarPoly {
 public:
  using Terms = std::map<Exp2, S>;

  BivarPoly() = default;
  explicit BivarPoly(const S& constant) {
    if (!scalar_is_zero(constant)) terms_[{0, 0}] = constant;
  }

  static BivarPoly monomial(int i, int j, const S& c) {
    BivarPoly p;
    p.add_term(i, j, c);
    return p;
  }
  static BivarPoly var_x() { return monomial(1, 0, S(1)); }
  static BivarPoly var_y() { return monomial(0, 1, S(1)); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  /// Accumulates c * X^i Y^j, pruning if the sum cancels.
  void add_term(int i, int j, const S& c) {
    if (i < 0 || j < 0) throw std::invalid_argument("negative exponent in BivarPoly");
    if (scalar_is_zero(c)) return;
    auto it = terms_.find({i, j});
    if (it == terms_.end()) {
      terms_.emplace(Exp2{i, j}, c);
    } else {
      it->second += c;
      if (scalar_is_zero(it->second)) terms_.erase(it);
    }
  }

  S coeff(int i, int j) const {
    auto it = terms_.find({i, j});
    return it == terms_.end() ? S(0) : it->second;
  }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
    return d;
  }
  int degree_y() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.second);
    return d;
  }
  int degree_x() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.first);
    return d;
  }

  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exp2{0, 0}); }
  S constant_value() const { return coeff(0, 0); }

  BivarPoly operator-() const {
    BivarPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }

  BivarPoly& operator+=(const BivarPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, c);
    return *this;
  }
  BivarPoly& operator-=(const BivarPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, -c);
    return *this;
  }

  friend BivarPoly operator+(BivarPoly a, const BivarPoly& b) { return a += b; }
  friend BivarPoly operator-(BivarPoly a, const BivarPoly& b) { return a -= b; }

  friend BivarPoly operator*(const BivarPoly& a, const BivarPoly& b) {
    BivarPoly r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_)
        r.add_term(ea.first + eb.first, ea.second + eb.second, ca * cb);
    return r;
  }

  BivarPoly scaled(const S& k) const {
    BivarPoly r;
    if (scalar_is_zero(k)) return r;
    for (const auto& [e, c] : terms_) r.terms_[e] = c * k;
    return r;
  }

  BivarPoly derivative_x() const {
    BivarPoly r;
    for (const auto& [e, c] : terms_)
      if (e.first > 0) r.add_term(e.first - 1, e.second, c * S(e.first));
    return r;
  }
  BivarPoly derivative_y() const {
    BivarPoly r;
    for (const auto& [e, c] : terms_)
      if (e.second > 0) r.add_term(e.first, e.second - 1, c * S(e.second));
    return r;
  }

  friend bool operator==(const BivarPoly& a, const BivarPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const BivarPoly& a, const BivarPoly& b) { return !(a == b); }

  /// Evaluates with X := x, Y := y in any commutative ring R that is
  /// constructible from S and from int.  R = S gives point evaluation,
  /// R = BivarPoly<S> gives composition, R = LaurentBivar<S> gives Laurent
  /// substitution.  Powers are cached, so cost is linear in the term count
  /// plus max exponents.
  template <class R>
  R substituted(const R& x, const R& y) const {
    int mi = 0, mj = 0;
    for (const auto& [e, c] : terms_) {
      mi = std::max(mi, e.first);
      mj = std::max(mj, e.second);
    }
    std::vector<R> xp, yp;
    xp.reserve(mi + 1);
    yp.reserve(mj + 1);
    xp.push_back(R(S(1)));
    yp.push_back(R(S(1)));
    for (int k = 1; k <= mi; ++k) xp.push_back(xp.back() * x);
    for (int k = 1; k <= mj; ++k) yp.push_back(yp.back() * y);
    R acc = R(S(0));
    for (const auto& [e, c] : terms_) acc += (xp[e.first] * yp[e.second]) * R(c);
    return acc;
  }

  S eval(const S& x, const S& y) const { return substituted<S>(x, y); }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << scalar_str(c);
      if (e.first) os << "*X^" << e.first;
      if (e.second) os << "*Y^" << e.second;
    }
    return os.str();
  }

 private:
  Terms terms_;
};

/// Sparse Laurent polynomial: X exponents may be negative, Y exponents stay
/// nonnegative.  This is exactly the shape produced by substituting a
/// canonical rational mapping into a polynomial map.
template <class S>
class LaurentBivar {
 public:
  using Terms = std::map<Exp2, S>;

  LaurentBivar() = default;
  explicit LaurentBivar(const S& constant) {
    if (!scalar_is_zero(constant)) terms_[{0, 0}] = constant;
  }

  static LaurentBivar monomial(int i, int j, const S& c) {
    LaurentBivar p;
    p.add_term(i, j, c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(int i, int j, const S& c) {
    if (j < 0) throw std::invalid_argument("negative Y exponent in LaurentBivar");
    if (scalar_is_zero(c)) return;
    auto it = terms_.find({i, j});
    if (it == terms_.end()) {
      terms_.emplace(Exp2{i, j}, c);
    } else {
      it->second += c;
      if (scalar_is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Smallest X exponent; 0 for the zero polynomial.
  int min_x_exponent() const {
    int m = 0;
    bool any = false;
    for (const auto& [e, c] : terms_) {
      if (!any || e.first < m) m = e.first;
      any = true;
    }
    return m;
  }

  bool is_polynomial() const { return min_x_exponent() >= 0; }

  BivarPoly<S> to_polynomial() const {
    if (!is_polynomial())
      throw std::domain_error("Laurent expression has negative X exponents");
    BivarPoly<S> p;
    for (const auto& [e, c] : terms_) p.add_term(e.first, e.second, c);
    return p;
  }

  LaurentBivar operator-() const {
    LaurentBivar r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }
  LaurentBivar& operator+=(const LaurentBivar& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, c);
    return *this;
  }
  friend LaurentBivar operator+(LaurentBivar a, const LaurentBivar& b) { return a += b; }
  friend LaurentBivar operator-(LaurentBivar a, const LaurentBivar& b) {
    for (const auto& [e, c] : b.terms_) a.add_term(e.first, e.second, -c);
    return a;
  }
  friend LaurentBivar operator*(const LaurentBivar& a, const LaurentBivar& b) {
    LaurentBivar r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_)
        r.add_term(ea.first + eb.first, ea.second + eb.second, ca * cb);
    return r;
  }

  friend bool operator==(const LaurentBivar& a, const LaurentBivar& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const LaurentBivar& a, const LaurentBivar& b) { return !(a == b); }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << scalar_str(c);
      if (e.first) os << "*X^" << e.first;
      if (e.second) os << "*Y^" << e.second;
    }
    return os.str();
  }

 private:
  Terms terms_;
};

using PolyQ = BivarPoly<GaussianRational>;
using PolyC = BivarPoly<std::complex<double>>;
using LaurentQ = LaurentBivar<GaussianRational>;

inline PolyC to_float(const PolyQ& p) {
  PolyC r;
  for (const auto& [e, c] : p.terms()) r.add_term(e.first, e.second, c.to_complex());
  return r;
}

}  // namespace keller
