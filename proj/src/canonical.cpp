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

#include "keller/canonical.hpp"

#include <cctype>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace keller {

UniPolyQ UniPolyQ::monomial(int k, GaussianRational c) {
  UniPolyQ p;
  if (k < 0) throw std::invalid_argument("negative exponent in UniPolyQ");
  p.coeffs.assign(k + 1, GaussianRational(0));
  p.coeffs[k] = std::move(c);
  p.trim();
  return p;
}

namespace {

// One signed term of the form [coef][*][X[^k]]; coef may be "a/b".
struct TermSpec {
  GaussianRational coef;
  int exp;
};

TermSpec parse_term(const std::string& t) {
  std::string s;
  for (char ch : t)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty term in polynomial literal");

  auto xpos = s.find_first_of("Xx");
  TermSpec out{GaussianRational(1), 0};
  std::string coef_part = (xpos == std::string::npos) ? s : s.substr(0, xpos);
  if (!coef_part.empty() && coef_part.back() == '*') coef_part.pop_back();
  if (coef_part == "-")
    out.coef = GaussianRational(-1);
  else if (!coef_part.empty() && coef_part != "+")
    out.coef = GaussianRational(GaussianRational::parse_rational(coef_part));

  if (xpos != std::string::npos) {
    std::string rest = s.substr(xpos + 1);
    if (rest.empty()) {
      out.exp = 1;
    } else if (rest[0] == '^') {
      out.exp = std::stoi(rest.substr(1));
      if (out.exp < 0) throw std::invalid_argument("negative exponent in polynomial literal");
    } else {
      throw std::invalid_argument("bad term '" + t + "'");
    }
  }
  return out;
}

}  // namespace

UniPolyQ UniPolyQ::parse(const std::string& text) {
  // Split on top-level +/- (every '-' starts a new term).
  UniPolyQ p;
  std::string cur;
  std::vector<std::string> pieces;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if ((ch == '+' || ch == '-') && !cur.empty() &&
        cur.find_first_not_of(" \t") != std::string::npos) {
      // '-' right after '^' or '/' would be part of a number; we do not
      // support those forms, so any sign splits.
      pieces.push_back(cur);
      cur.clear();
    }
    if (ch == '+' && cur.empty()) continue;  // leading plus
    cur += ch;
  }
  if (cur.find_first_not_of(" \t") != std::string::npos) pieces.push_back(cur);
  if (pieces.empty()) return UniPolyQ::zero();

  std::vector<GaussianRational> acc;
  for (const auto& piece : pieces) {
    TermSpec t = parse_term(piece);
    if (static_cast<int>(acc.size()) <= t.exp) acc.resize(t.exp + 1, GaussianRational(0));
    acc[t.exp] += t.coef;
  }
  return UniPolyQ(std::move(acc));
}

std::string UniPolyQ::str() const {
  if (coeffs.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    if (coeffs[k].is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << coeffs[k].str();
    if (k > 0) os << "*X^" << k;
  }
  return os.str();
}

CanonicalCheck check_canonical(int alpha, int beta, const UniPolyQ& phi) {
  CanonicalCheck c;
  if (alpha < 1 || beta < 0) {
    c.reason = "requires alpha >= 1 and beta >= 0";
    return c;
  }
  c.degree_ok = phi.degree() < alpha + beta;

  // Effective X powers of X^(alpha+beta) * Y + Phi(X).
  long long g = alpha + beta;
  for (int k = 0; k <= phi.degree(); ++k)
    if (!phi.coeffs[k].is_zero()) g = std::gcd(g, static_cast<long long>(k));
  c.gcd_ok = (g == 1);

  if (!c.degree_ok)
    c.reason = "deg Phi = " + std::to_string(phi.degree()) + " not < alpha+beta = " +
               std::to_string(alpha + beta);
  else if (!c.gcd_ok)
    c.reason = "effective X exponents have gcd " + std::to_string(g) + " != 1";
  c.ok = c.degree_ok && c.gcd_ok;
  return c;
}

CanonicalRational validate_canonical(int alpha, int beta, UniPolyQ phi) {
  CanonicalCheck c = check_canonical(alpha, beta, phi);
  if (!c.ok) throw std::invalid_argument("not canonical: " + c.reason);
  return CanonicalRational{alpha, beta, std::move(phi)};
}

LaurentMapPair substitute(const PolyMapQ& f, const CanonicalRational& r) {
  if (r.alpha < 1 || r.beta < 0)
    throw std::invalid_argument("substitute: requires alpha >= 1 and beta >= 0");
  // X := X^(-alpha), Y := X^beta * Y + X^(-alpha) * Phi(X)
  LaurentQ sub_x = LaurentQ::monomial(-r.alpha, 0, GaussianRational(1));
  LaurentQ sub_y = LaurentQ::monomial(r.beta, 1, GaussianRational(1));
  for (int k = 0; k <= r.phi.degree(); ++k)
    if (!r.phi.coeffs[k].is_zero()) sub_y.add_term(k - r.alpha, 0, r.phi.coeffs[k]);

  LaurentMapPair out;
  out.first = f.p().substituted<LaurentQ>(sub_x, sub_y);
  out.second = f.q().substituted<LaurentQ>(sub_x, sub_y);
  return out;
}

PolyMapQ dual_map(const PolyMapQ& f, const CanonicalRational& r) {
  LaurentMapPair pair = substitute(f, r);
  if (!pair.is_polynomial())
    throw std::domain_error(
        "dual map undefined: substituted map keeps negative X exponents "
        "(min " +
        std::to_string(std::min(pair.first.min_x_exponent(), pair.second.min_x_exponent())) +
        ")");
  return PolyMapQ(pair.first.to_polynomial(), pair.second.to_polynomial());
}

std::vector<std::pair<std::complex<double>, std::complex<double>>>
component_parametrization(const PolyMapQ& g_r, int samples) {
  std::vector<std::pair<std::complex<double>, std::complex<double>>> out;
  if (samples <= 0) return out;
  out.reserve(samples);
  const PolyMapC gf = to_float(g_r);
  for (int k = 0; k < samples; ++k) {
    const double y = (samples == 1) ? 0.0 : -1.0 + 2.0 * k / (samples - 1);
    out.push_back(gf.eval({0.0, 0.0}, {y, 0.0}));
  }
  return out;
}

MonotonicityReport check_basis_monotonicity(const PolyMapQ& f, const PolyMapQ& g,
                                            const CanonicalRational& r) {
  MonotonicityReport rep;
  rep.g_r_polynomial = substitute(g, r).is_polynomial();
  rep.fg_r_polynomial = substitute(compose(f, g), r).is_polynomial();
  rep.violation = rep.g_r_polynomial && !rep.fg_r_polynomial;
  return rep;
}

}  // namespace keller
