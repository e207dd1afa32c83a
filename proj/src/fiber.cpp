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

#include "keller/fiber.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace keller {

namespace {

// Chebyshev span for the eliminant interpolation.  Kept modest so the
// dynamic range of the Sylvester entries stays within double precision for
// degree ~30 coefficient polynomials; interpolation itself is exact at any
// distinct nodes.
constexpr double kNodeRadius = 1.5;

double norm2(C2 p) { return std::sqrt(std::norm(p.first) + std::norm(p.second)); }

/// Determinant with per-row equilibration: each row is scaled to unit max
/// first, so `scaled` is a scale-free singularity witness in [0, ~n^(n/2)]
/// while the returned value is the true determinant.
Cplx equilibrated_det(Eigen::MatrixXcd m, double* scaled_mag) {
  const int n = static_cast<int>(m.rows());
  double log_scale = 0.0;
  for (int r = 0; r < n; ++r) {
    const double rmax = m.row(r).cwiseAbs().maxCoeff();
    if (rmax == 0.0) {
      *scaled_mag = 0.0;
      return Cplx(0.0);
    }
    m.row(r) /= rmax;
    log_scale += std::log(rmax);
  }
  const Cplx det = m.partialPivLu().determinant();
  *scaled_mag = std::abs(det);
  return det * std::exp(log_scale);
}

/// Dense X-coefficient vectors of the Y-power coefficients of p:
/// out[k][i] = coeff of X^i Y^k.
std::vector<std::vector<Cplx>> y_coefficient_table(const PolyC& p) {
  const int dy = std::max(0, p.degree_y());
  const int dx = std::max(0, p.degree_x());
  std::vector<std::vector<Cplx>> out(dy + 1, std::vector<Cplx>(dx + 1, Cplx(0)));
  for (const auto& [e, c] : p.terms()) out[e.second][e.first] = c;
  return out;
}

Cplx horner(const std::vector<Cplx>& coeffs, Cplx x) {
  Cplx v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

Cplx eval_poly(const PolyC& p, Cplx x, Cplx y) {
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

}  // namespace

FiberSolver::FiberSolver(PolyMapC f, FiberTolerances tol) : f_(std::move(f)), tol_(tol) {
  if (f_.p().is_constant() || f_.q().is_constant())
    throw std::invalid_argument("solve_fiber: map must be nonconstant in both components");
  deg_p_ = f_.deg_p();
  deg_q_ = f_.deg_q();
  ydeg_p_ = std::max(0, f_.p().degree_y());
  ydeg_q_ = std::max(0, f_.q().degree_y());
  bezout_ = static_cast<long>(deg_p_) * static_cast<long>(deg_q_);
  px_ = f_.p().derivative_x();
  py_ = f_.p().derivative_y();
  qx_ = f_.q().derivative_x();
  qy_ = f_.q().derivative_y();
  p_ycoeffs_ = y_coefficient_table(f_.p());
  q_ycoeffs_ = y_coefficient_table(f_.q());

  if (ydeg_p_ >= 1 && ydeg_q_ >= 1) {
    // Sylvester route: the determinant has X-degree at most dQ*n + dP*m, so
    // that many (+1) nodes determine it exactly.
    const int n_nodes = ydeg_q_ * deg_p_ + ydeg_p_ * deg_q_ + 1;
    nodes_ = chebyshev_nodes(n_nodes, kNodeRadius);
    p_at_nodes_.assign(nodes_.size(), {});
    q_at_nodes_.assign(nodes_.size(), {});
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
      const Cplx x(nodes_[s], 0.0);
      p_at_nodes_[s].resize(ydeg_p_ + 1);
      for (int k = 0; k <= ydeg_p_; ++k) p_at_nodes_[s][k] = horner(p_ycoeffs_[k], x);
      q_at_nodes_[s].resize(ydeg_q_ + 1);
      for (int k = 0; k <= ydeg_q_; ++k) q_at_nodes_[s][k] = horner(q_ycoeffs_[k], x);
    }
  }
}

UniPolyC FiberSolver::eliminant(C2 target, bool* degenerate) const {
  *degenerate = false;

  // A component without Y eliminates it for free.
  if (ydeg_p_ == 0 || ydeg_q_ == 0) {
    const bool use_p = (ydeg_p_ == 0);
    const auto& table = use_p ? p_ycoeffs_ : q_ycoeffs_;
    const Cplx shift = use_p ? target.first : target.second;
    UniPolyC e;
    e.coeffs = table[0];
    if (e.coeffs.empty()) e.coeffs.push_back(Cplx(0));
    e.coeffs[0] -= shift;
    double scale = std::abs(shift);
    for (const Cplx& c : table[0]) scale = std::max(scale, std::abs(c));
    if (e.max_abs_coeff() < tol_.degenerate_rel * std::max(scale, 1.0)) *degenerate = true;
    return e;
  }

  // Sylvester matrix of P - a and Q - b as Y-polynomials, evaluated at the
  // precomputed nodes.  The equilibrated determinant magnitude is a
  // scale-free singularity witness: a structurally zero resultant leaves only
  // rounding noise at every node.
  const int size = ydeg_p_ + ydeg_q_;
  std::vector<Cplx> values(nodes_.size());
  double max_scaled = 0.0;
  Eigen::MatrixXcd m(size, size);
  for (std::size_t s = 0; s < nodes_.size(); ++s) {
    m.setZero();
    for (int row = 0; row < ydeg_q_; ++row)
      for (int k = 0; k <= ydeg_p_; ++k) {
        Cplx v = p_at_nodes_[s][ydeg_p_ - k];
        if (ydeg_p_ - k == 0) v -= target.first;
        m(row, row + k) = v;
      }
    for (int row = 0; row < ydeg_p_; ++row)
      for (int k = 0; k <= ydeg_q_; ++k) {
        Cplx v = q_at_nodes_[s][ydeg_q_ - k];
        if (ydeg_q_ - k == 0) v -= target.second;
        m(ydeg_q_ + row, row + k) = v;
      }
    double scaled_mag = 0.0;
    values[s] = equilibrated_det(m, &scaled_mag);
    max_scaled = std::max(max_scaled, scaled_mag);
  }
  if (max_scaled < tol_.degenerate_rel) {
    *degenerate = true;
    return UniPolyC{};
  }

  return interpolate_newton(nodes_, values);
}

std::vector<Cplx> FiberSolver::y_candidates(Cplx x, C2 target) const {
  std::vector<Cplx> out;
  auto add_roots = [&](const std::vector<std::vector<Cplx>>& table, Cplx shift) {
    UniPolyC spec;
    spec.coeffs.resize(table.size());
    for (std::size_t k = 0; k < table.size(); ++k) spec.coeffs[k] = horner(table[k], x);
    if (spec.coeffs.empty()) return;
    spec.coeffs[0] -= shift;
    spec.trim_leading();
    if (spec.degree() < 1) return;
    std::vector<Cplx> roots = aberth_roots(spec, tol_.aberth);
    out.insert(out.end(), roots.begin(), roots.end());
  };
  add_roots(p_ycoeffs_, target.first);
  add_roots(q_ycoeffs_, target.second);
  return out;
}

bool FiberSolver::polish(C2 target, Cplx& x, Cplx& y, double& residual) const {
  const double goal = 1e-14 * (1.0 + norm2(target));

  Cplx bx = x, by = y;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < tol_.polish_max_iter; ++it) {
    const Cplx r1 = eval_poly(f_.p(), x, y) - target.first;
    const Cplx r2 = eval_poly(f_.q(), x, y) - target.second;
    const double res = std::sqrt(std::norm(r1) + std::norm(r2));
    if (res < best) {
      best = res;
      bx = x;
      by = y;
    }
    if (res < goal) break;
    const Cplx jpx = eval_poly(px_, x, y), jpy = eval_poly(py_, x, y);
    const Cplx jqx = eval_poly(qx_, x, y), jqy = eval_poly(qy_, x, y);
    const Cplx det = jpx * jqy - jpy * jqx;
    if (std::abs(det) < 1e-300) break;
    x -= (jqy * r1 - jpy * r2) / det;
    y -= (-jqx * r1 + jpx * r2) / det;
  }
  x = bx;
  y = by;
  residual = best;
  return true;
}

FiberResult FiberSolver::solve(C2 target) const {
  FiberResult out;
  out.target = target;
  out.bezout_bound = bezout_;

  const double residual_tol = tol_.residual_rel * (1.0 + norm2(target));

  // Fully X-dependent map (no Y anywhere): the fiber is either empty or a
  // positive-dimensional line in Y.
  if (ydeg_p_ == 0 && ydeg_q_ == 0) {
    UniPolyC ep;
    ep.coeffs = p_ycoeffs_[0];
    ep.coeffs[0] -= target.first;
    ep.trim_leading();
    if (ep.degree() < 1) {
      out.status = FiberStatus::Degenerate;
      return out;
    }
    for (Cplx x : aberth_roots(ep, tol_.aberth)) {
      const Cplx qv = horner(q_ycoeffs_[0], x);
      if (std::abs(qv - target.second) <= residual_tol) {
        out.status = FiberStatus::Degenerate;  // y is unconstrained
        return out;
      }
    }
    out.status = FiberStatus::Empty;
    return out;
  }

  bool degenerate = false;
  UniPolyC elim = eliminant(target, &degenerate);
  if (degenerate) {
    out.status = FiberStatus::Degenerate;
    return out;
  }
  elim.trim_leading();

  std::vector<Cplx> x_candidates = aberth_roots(elim, tol_.aberth);
  for (Cplx x0 : x_candidates) {
    for (Cplx y0 : y_candidates(x0, target)) {
      Cplx x = x0, y = y0;
      double res = 0.0;
      polish(target, x, y, res);
      if (res > residual_tol) continue;
      // Deduplicate against accepted points, keeping the sharper residual.
      bool merged = false;
      for (std::size_t t = 0; t < out.points.size(); ++t) {
        const double ctol =
            tol_.cluster_rel * (1.0 + norm2(out.points[t]));
        const double dist = std::sqrt(std::norm(out.points[t].first - x) +
                                      std::norm(out.points[t].second - y));
        if (dist <= ctol) {
          if (res < out.residuals[t]) {
            out.points[t] = {x, y};
            out.residuals[t] = res;
          }
          merged = true;
          break;
        }
      }
      if (!merged) {
        out.points.push_back({x, y});
        out.residuals.push_back(res);
      }
    }
  }

  out.status = out.points.empty() ? FiberStatus::Empty : FiberStatus::Finite;
  return out;
}

// --- chains ---

ChainSolver::ChainSolver(const MapChain& chain, FiberTolerances tol) : tol_(tol) {
  if (chain.links.empty()) throw std::invalid_argument("ChainSolver: empty chain");
  for (const ChainLink& l : chain.links) {
    Stage st;
    st.map = to_float(l.map);
    st.jacobian = to_float(jacobian_det(l.map));
    if (l.inverse) {
      st.inverse = to_float(*l.inverse);
    } else {
      st.solver.emplace(st.map, tol_);
    }
    stages_.push_back(std::move(st));
  }
}

bool ChainSolver::fully_invertible() const {
  for (const Stage& st : stages_)
    if (!st.inverse) return false;
  return true;
}

C2 ChainSolver::eval(C2 z) const {
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it)
    z = {eval_poly(it->map.p(), z.first, z.second), eval_poly(it->map.q(), z.first, z.second)};
  return z;
}

double ChainSolver::jacobian_weight(C2 z) const {
  double w = 1.0;
  for (std::size_t k = stages_.size(); k-- > 0;) {
    w *= std::norm(eval_poly(stages_[k].jacobian, z.first, z.second));
    z = {eval_poly(stages_[k].map.p(), z.first, z.second),
         eval_poly(stages_[k].map.q(), z.first, z.second)};
  }
  return w;
}

std::vector<C2> ChainSolver::preimages(C2 w) const {
  std::vector<C2> current{w};
  for (const Stage& st : stages_) {
    std::vector<C2> next;
    for (C2 t : current) {
      if (st.inverse) {
        next.push_back({eval_poly(st.inverse->p(), t.first, t.second),
                        eval_poly(st.inverse->q(), t.first, t.second)});
        continue;
      }
      FiberResult fr = st.solver->solve(t);
      if (fr.status == FiberStatus::Degenerate)
        throw DegenerateFiberError("degenerate fiber in chain stage");
      next.insert(next.end(), fr.points.begin(), fr.points.end());
    }
    current = std::move(next);
    if (current.empty()) break;
  }
  if (current.size() <= 1) return current;

  // Cross-branch duplicates can appear at non-generic targets.
  std::vector<C2> dedup;
  for (C2 p : current) {
    bool seen = false;
    for (C2 q : dedup) {
      const double ctol = tol_.cluster_rel * (1.0 + norm2(q));
      if (std::sqrt(std::norm(p.first - q.first) + std::norm(p.second - q.second)) <= ctol) {
        seen = true;
        break;
      }
    }
    if (!seen) dedup.push_back(p);
  }
  return dedup;
}

long ChainSolver::bezout_bound() const {
  long b = 1;
  for (const Stage& st : stages_)
    b *= std::max(1L, static_cast<long>(st.map.deg_p()) * static_cast<long>(st.map.deg_q()));
  return b;
}

// --- degree estimation ---

namespace {

template <class CountFn>
DegreeEstimate degree_from_samples(CountFn&& count_fiber, std::uint64_t seed,
                                   const DegreeOptions& opts) {
  if (opts.k_targets < 5)
    throw std::invalid_argument("geometric_degree: needs at least 5 targets");
  DegreeEstimate est;
  est.samples = opts.k_targets;
  for (int i = 0; i < opts.k_targets; ++i) {
    RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(i));
    const C2 target = uniform_in_ball4(rng, opts.target_radius);
    const int c = count_fiber(target);
    est.histogram[c] += 1;
    est.d = std::max(est.d, c);
  }
  est.confident = est.histogram.count(est.d) &&
                  est.histogram.at(est.d) * 5 >= est.samples * 4;
  return est;
}

}  // namespace

DegreeEstimate geometric_degree(const PolyMapQ& f, std::uint64_t seed, DegreeOptions opts) {
  FiberSolver solver(f, opts.tol);
  return degree_from_samples(
      [&](C2 t) {
        FiberResult fr = solver.solve(t);
        if (fr.status == FiberStatus::Degenerate)
          throw DegenerateFiberError("degenerate fiber while estimating degree");
        return static_cast<int>(fr.count());
      },
      seed, opts);
}

DegreeEstimate geometric_degree(const MapChain& f, std::uint64_t seed, DegreeOptions opts) {
  ChainSolver solver(f, opts.tol);
  return degree_from_samples(
      [&](C2 t) { return static_cast<int>(solver.preimages(t).size()); }, seed, opts);
}

bool image_contains(const PolyMapQ& f, C2 w, const CharacteristicDomain& region,
                    FiberTolerances tol) {
  FiberResult fr = solve_fiber(f, w, tol);
  if (fr.status == FiberStatus::Degenerate)
    throw DegenerateFiberError("degenerate fiber in image membership query");
  for (C2 p : fr.points)
    if (region.contains(p.first, p.second)) return true;
  return false;
}

}  // namespace keller
