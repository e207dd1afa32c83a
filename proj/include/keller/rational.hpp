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

#include <gmpxx.h>

#include <complex>
#include <stdexcept>
#include <string>

namespace keller {

/// Exact Gaussian rational a + b*i with arbitrary-precision rational parts.
///
/// Both parts are kept canonical (lowest terms, positive denominator) by GMP.
/// Conversion to floating complex is always available; the reverse direction
/// is deliberately not provided on this type, so float data cannot leak into
/// exact pipelines unnoticed.
class GaussianRational {
 public:
  GaussianRational() : re_(0), im_(0) {}
  GaussianRational(int v) : re_(v), im_(0) {}  // NOLINT: implicit by design
  GaussianRational(long v) : re_(static_cast<long>(v)), im_(0) {}
  GaussianRational(mpq_class re, mpq_class im = mpq_class(0))
      : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  /// Parses one rational part, e.g. "-3/4" or "5".
  static mpq_class parse_rational(const std::string& s) {
    mpq_class q;
    if (s.empty() || mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
      throw std::invalid_argument("bad rational literal: '" + s + "'");
    if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
      throw std::invalid_argument("zero denominator in rational literal: '" + s + "'");
    q.canonicalize();
    return q;
  }

  static GaussianRational parse(const std::string& re, const std::string& im) {
    return GaussianRational(parse_rational(re), parse_rational(im));
  }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_real() const { return im_ == 0; }

  GaussianRational operator-() const { return GaussianRational(-re_, -im_); }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero GaussianRational");
    mpq_class n = o.re_ * o.re_ + o.im_ * o.im_;
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
    mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  GaussianRational conj() const { return GaussianRational(re_, -im_); }

  /// |z|^2 as an exact rational.
  mpq_class norm_sq() const { return re_ * re_ + im_ * im_; }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  /// Canonical decimal string of one part, "n" or "n/d".
  static std::string rational_str(const mpq_class& q) { return q.get_str(); }
  std::string re_str() const { return rational_str(re_); }
  std::string im_str() const { return rational_str(im_); }

  std::string str() const {
    if (im_ == 0) return re_str();
    return "(" + re_str() + (im_ > 0 ? "+" : "") + im_str() + "i)";
  }

 private:
  mpq_class re_, im_;
};

// --- scalar glue shared by the exact and float polynomial instantiations ---

inline bool scalar_is_zero(const GaussianRational& s) { return s.is_zero(); }
inline bool scalar_is_zero(const std::complex<double>& s) {
  return s.real() == 0.0 && s.imag() == 0.0;
}

inline std::complex<double> to_complex(const GaussianRational& s) { return s.to_complex(); }
inline std::complex<double> to_complex(const std::complex<double>& s) { return s; }

inline std::string scalar_str(const GaussianRational& s) { return s.str(); }
inline std::string scalar_str(const std::complex<double>& s) {
  return "(" + std::to_string(s.real()) + "," + std::to_string(s.imag()) + ")";
}

}  // namespace keller
