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

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "keller/canonical.hpp"
#include "keller/domain.hpp"
#include "keller/fiber.hpp"
#include "keller/keller_check.hpp"
#include "keller/map_io.hpp"
#include "keller/metric.hpp"
#include "keller/semigroup.hpp"

namespace {

using namespace keller;

// Exit codes: 0 ok, 2 parse failure, 3 precondition failure, 4 assertion
// failure, 5 degenerate-fiber overflow.
enum ExitCode : int {
  kOk = 0,
  kParseFailure = 2,
  kPreconditionFailure = 3,
  kAssertionFailure = 4,
  kDegenerateOverflow = 5,
};

/// Raised by experiments whose in-scope assertion failed.
struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV sink: file when --out was given, stdout otherwise.  Rows are emitted
/// in a fixed order with %.17g doubles, so identical configs give
/// byte-identical output.
class CsvOut {
 public:
  explicit CsvOut(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write output file: " + path);
    }
  }
  void line(const std::string& s) {
    if (file_.is_open())
      file_ << s << "\n";
    else
      std::cout << s << "\n";
  }

 private:
  std::ofstream file_;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("KELLER_LAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ParseError("KELLER_LAB_SEED is not an unsigned integer");
    }
  }
  return 0;
}

C2 parse_target(const std::string& s) {
  double v[4];
  char extra;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf%c", &v[0], &v[1], &v[2], &v[3], &extra) != 4)
    throw ParseError("target must be a_re,a_im,b_re,b_im");
  return {Cplx(v[0], v[1]), Cplx(v[2], v[3])};
}

std::string points_field(const std::vector<C2>& pts) {
  std::ostringstream os;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k) os << ';';
    os << fmt(pts[k].first.real()) << ' ' << fmt(pts[k].first.imag()) << ' '
       << fmt(pts[k].second.real()) << ' ' << fmt(pts[k].second.imag());
  }
  return os.str();
}

MapChain load_chain(const std::string& map_path, const std::string& inverse_path) {
  PolyMapQ f = load_map(map_path);
  if (inverse_path.empty()) return MapChain(std::move(f));
  PolyMapQ inv = load_map(inverse_path);
  if (!equal_exact(compose(f, inv), PolyMapQ::identity()) ||
      !equal_exact(compose(inv, f), PolyMapQ::identity()))
    throw std::invalid_argument("supplied inverse does not invert the map exactly");
  return MapChain::invertible(std::move(f), std::move(inv));
}

std::string metric_header() {
  return "value,std_error,n,discarded,seed,g1_side,g2_side,resampled";
}

std::string metric_row(const MetricEstimate& e) {
  std::ostringstream os;
  os << fmt(e.value) << ',' << fmt(e.std_error) << ',' << e.samples << ',' << e.discarded << ','
     << e.seed << ',' << fmt(e.g1_side) << ',' << fmt(e.g2_side) << ',' << e.resampled;
  return os.str();
}

// --- experiments ------------------------------------------------------------

struct ExperimentArgs {
  CharacteristicDomain domain;
  long samples = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
  int triples = 20;
  long oracle_samples = 40000;
  std::string out;
  std::string map_path;
};

McOptions mc_options(const ExperimentArgs& a, std::uint64_t salt = 0) {
  McOptions o;
  o.samples = a.samples;
  o.seed = a.seed ^ salt;
  o.threads = a.threads;
  return o;
}

int run_isometry(const ExperimentArgs& a) {
  CsvOut out(a.out);
  out.line("triple,rho_base,rho_moved,abs_diff,sigma_combined,ratio,seed,n,pass");
  bool all_ok = true;
  for (int t = 0; t < a.triples; ++t) {
    RngStream rng = RngStream::substream(a.seed, 0x150 + t);
    const MapChain f = random_automorphism(rng, 16);
    const MapChain g1 = random_automorphism(rng, 16);
    const MapChain g2 = random_automorphism(rng, 16);
    const McOptions opts = mc_options(a, 1000 + t);
    MetricEstimate base = rho(g1, g2, a.domain, opts);
    MetricEstimate moved = rho(compose(f, g1), compose(f, g2), a.domain, opts);
    const double sigma = std::sqrt(base.std_error * base.std_error +
                                   moved.std_error * moved.std_error);
    const double diff = std::abs(base.value - moved.value);
    const bool pass = diff <= 3.0 * sigma;
    all_ok = all_ok && pass;
    std::ostringstream os;
    os << t << ',' << fmt(base.value) << ',' << fmt(moved.value) << ',' << fmt(diff) << ','
       << fmt(sigma) << ',' << fmt(base.value > 0 ? moved.value / base.value : 1.0) << ','
       << opts.seed << ',' << opts.samples << ',' << (pass ? 1 : 0);
    out.line(os.str());
  }
  if (!all_ok) throw AssertionFailure("isometry deviation beyond 3 sigma");
  return kOk;
}

int run_contraction(const ExperimentArgs& a) {
  CsvOut out(a.out);
  out.line("triple,f_kind,mode,d_f,lhs,rhs,ratio,slack,violations,checked,seed,n,pass");
  bool all_ok = true;
  for (int t = 0; t < a.triples; ++t) {
    RngStream rng = RngStream::substream(a.seed, 0x2c0 + t);
    const bool non_keller = (t % 2 == 1);
    MapChain f = non_keller ? power_map(2, 1 + static_cast<int>(rng.below(2)))
                            : random_automorphism(rng, 16);
    const MapChain g1 = random_automorphism(rng, 16);
    const MapChain g2 = random_automorphism(rng, 16);
    McOptions opts = mc_options(a, 2000 + t);
    if (non_keller) opts.samples = std::min<long>(opts.samples, 20000);
    ContractionReport rep = contraction_experiment(f, g1, g2, a.domain, opts);
    all_ok = all_ok && rep.holds;
    std::ostringstream os;
    os << t << ',' << (non_keller ? "power" : "automorphism") << ','
       << (rep.mode == ContractionReport::Mode::Inequality ? "inequality" : "containment") << ','
       << rep.f_degree.d << ',' << fmt(rep.lhs.value) << ',' << fmt(rep.rhs.value) << ','
       << fmt(rep.ratio) << ',' << fmt(rep.slack) << ',' << rep.containment_violations << ','
       << rep.containment_samples << ',' << opts.seed << ',' << opts.samples << ','
       << (rep.holds ? 1 : 0);
    out.line(os.str());
  }
  if (!all_ok) throw AssertionFailure("contraction property violated");
  return kOk;
}

int run_bounds(const ExperimentArgs& a) {
  CsvOut out(a.out);
  out.line("trial,d_f,region_vol,image_vol,image_std_error,upper_ok,lower_ok,seed,n");
  bool all_ok = true;
  for (int t = 0; t < a.triples; ++t) {
    RngStream rng = RngStream::substream(a.seed, 0xb0 + t);
    // Low-degree maps keep the image a usable fraction of its bounding box;
    // box-membership MC on higher-degree composites would see ~zero hits.
    const MapChain f = random_automorphism(rng, 4);
    const McOptions opts = mc_options(a, 3000 + t);
    BoundsReport rep = volume_bounds_check(f, a.domain, opts);
    all_ok = all_ok && rep.upper_ok && rep.lower_ok;
    std::ostringstream os;
    os << t << ',' << rep.f_degree.d << ',' << fmt(rep.region_vol) << ',' << fmt(rep.image_vol)
       << ',' << fmt(rep.image_std_error) << ',' << rep.upper_ok << ',' << rep.lower_ok << ','
       << opts.seed << ',' << opts.samples;
    out.line(os.str());
  }
  if (!all_ok) throw AssertionFailure("volume bounds violated beyond 3 sigma");
  return kOk;
}

int run_degree_mult(const ExperimentArgs& a) {
  if (a.map_path.empty()) throw std::invalid_argument("degree-mult needs --map");
  CsvOut out(a.out);
  const PolyMapQ f = load_map(a.map_path);
  DegreeOptions dopts;
  DegreeEstimate df = geometric_degree(f, a.seed);
  DegreeEstimate dff = geometric_degree(compose(MapChain(f), MapChain(f)), a.seed + 1, dopts);
  out.line("d_f,d_ff,product_ok,confident_f,confident_ff,seed,n,std_error");
  std::ostringstream os;
  const bool ok = dff.d == df.d * df.d;
  os << df.d << ',' << dff.d << ',' << (ok ? 1 : 0) << ',' << df.confident << ','
     << dff.confident << ',' << a.seed << ',' << df.samples << ',' << 0;
  out.line(os.str());
  if (!ok) throw AssertionFailure("degree multiplicativity failed");
  return kOk;
}

int run_metric_axioms(const ExperimentArgs& a) {
  CsvOut out(a.out);
  out.line("triple,identity_ok,symmetry_ok,d13,d12_plus_d23,slack,triangle_ok,seed,n");
  bool all_ok = true;
  for (int t = 0; t < a.triples; ++t) {
    RngStream rng = RngStream::substream(a.seed, 0xa1 + t);
    const MapChain g1 = random_automorphism(rng, 16);
    const MapChain g2 = random_automorphism(rng, 16);
    const MapChain g3 = random_automorphism(rng, 16);
    const McOptions opts = mc_options(a, 4000 + t);
    const bool identity_ok = rho(g1, g1, a.domain, opts).value == 0.0;
    MetricEstimate d12 = rho(g1, g2, a.domain, opts);
    MetricEstimate d21 = rho(g2, g1, a.domain, opts);
    const bool symmetry_ok = d12.value == d21.value;
    MetricEstimate d13 = rho(g1, g3, a.domain, opts);
    MetricEstimate d23 = rho(g2, g3, a.domain, opts);
    const double slack = 3.0 * std::sqrt(d13.std_error * d13.std_error +
                                         d12.std_error * d12.std_error +
                                         d23.std_error * d23.std_error);
    const bool triangle_ok = d13.value <= d12.value + d23.value + slack;
    const bool pass = identity_ok && symmetry_ok && triangle_ok;
    all_ok = all_ok && pass;
    std::ostringstream os;
    os << t << ',' << identity_ok << ',' << symmetry_ok << ',' << fmt(d13.value) << ','
       << fmt(d12.value + d23.value) << ',' << fmt(slack) << ',' << triangle_ok << ','
       << opts.seed << ',' << opts.samples;
    out.line(os.str());
  }
  if (!all_ok) throw AssertionFailure("metric axiom violated");
  return kOk;
}

int run_volume_oracle(const ExperimentArgs& a) {
  if (a.map_path.empty()) throw std::invalid_argument("volume-oracle needs --map");
  CsvOut out(a.out);
  const MapChain g(load_map(a.map_path));
  const McOptions opts = mc_options(a);
  VolumeReport rep = mult_volume(g, a.domain, opts);

  // Independent target-space oracle: integrate the preimage count over a
  // box.  The box must cover the image; build it from a generous sample of
  // image points with a wide pad (under-coverage biases the oracle low).
  ChainSolver solver(g, opts.tol);
  RngStream probe = RngStream::substream(opts.seed, 0x0b0);
  double lo[4] = {1e300, 1e300, 1e300, 1e300}, hi[4] = {-1e300, -1e300, -1e300, -1e300};
  const long box_samples = std::max<long>(20000, a.samples / 10);
  for (long i = 0; i < box_samples; ++i) {
    const C2 img = solver.eval(a.domain.sample(probe));
    const double v[4] = {img.first.real(), img.first.imag(), img.second.real(),
                         img.second.imag()};
    for (int k = 0; k < 4; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  }
  double box_vol = 1.0;
  for (int k = 0; k < 4; ++k) {
    const double pad = 0.1 * (hi[k] - lo[k]) + 1e-9;
    lo[k] -= pad;
    hi[k] += pad;
    box_vol *= hi[k] - lo[k];
  }
  RngStream orng = RngStream::substream(opts.seed, 0x0b1);
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < a.oracle_samples; ++i) {
    const C2 w = {Cplx(orng.uniform(lo[0], hi[0]), orng.uniform(lo[1], hi[1])),
                  Cplx(orng.uniform(lo[2], hi[2]), orng.uniform(lo[3], hi[3]))};
    long count = 0;
    for (C2 p : solver.preimages(w))
      if (a.domain.contains(p.first, p.second)) ++count;
    sum += static_cast<double>(count);
    sum2 += static_cast<double>(count) * static_cast<double>(count);
  }
  const double n = static_cast<double>(a.oracle_samples);
  const double mean = sum / n;
  const double oracle = box_vol * mean;
  const double oracle_se = box_vol * std::sqrt(std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) / n);
  const double sigma = std::sqrt(rep.mult_std_error * rep.mult_std_error + oracle_se * oracle_se);
  const bool pass = std::abs(rep.mult_vol - oracle) <= 3.0 * sigma;

  out.line("mult_vol,mult_std_error,oracle_vol,oracle_std_error,geometric_vol,geometric_std_"
           "error,excess,seed,n,discarded,pass");
  std::ostringstream os;
  os << fmt(rep.mult_vol) << ',' << fmt(rep.mult_std_error) << ',' << fmt(oracle) << ','
     << fmt(oracle_se) << ',' << fmt(rep.geometric_vol) << ',' << fmt(rep.geometric_std_error)
     << ',' << fmt(rep.excess) << ',' << opts.seed << ',' << opts.samples << ',' << rep.discarded
     << ',' << (pass ? 1 : 0);
  out.line(os.str());
  if (!pass) throw AssertionFailure("multiplicity volume disagrees with the preimage oracle");
  return kOk;
}

// --- main -------------------------------------------------------------------

int dispatch(int argc, char** argv) {
  CLI::App app{"keller-lab: a laboratory for polynomial etale self-maps of C^2"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  long samples = 100000;
  int threads = 0;
  std::string out_path;
  app.add_option("--seed", seed_flag, "RNG seed (fallback: KELLER_LAB_SEED, then 0)");
  app.add_option("--samples", samples, "Monte Carlo sample count");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--out", out_path, "output path (default: stdout)");

  // fiber
  auto* fiber_cmd = app.add_subcommand("fiber", "solve F(x,y) = target");
  std::string fiber_map, fiber_target;
  fiber_cmd->add_option("--map", fiber_map, "map JSON file")->required();
  fiber_cmd->add_option("--target", fiber_target, "a_re,a_im,b_re,b_im")->required();

  // degree
  auto* degree_cmd = app.add_subcommand("degree", "estimate the geometric degree");
  std::string degree_map;
  int degree_targets = 25;
  degree_cmd->add_option("--map", degree_map)->required();
  degree_cmd->add_option("--targets", degree_targets, "number of sampled targets");

  // compose
  auto* compose_cmd = app.add_subcommand("compose", "compose two maps symbolically");
  std::string compose_f, compose_g;
  compose_cmd->add_option("--f", compose_f)->required();
  compose_cmd->add_option("--g", compose_g)->required();

  // check
  auto* check_cmd = app.add_subcommand("check", "report the Keller normalization conditions");
  std::string check_map;
  bool check_normalize = false;
  check_cmd->add_option("--map", check_map)->required();
  check_cmd->add_flag("--normalize", check_normalize, "emit a shear-normalized map");

  // asym
  auto* asym_cmd = app.add_subcommand("asym", "substitute a canonical rational mapping");
  std::string asym_map, asym_phi = "0";
  int asym_alpha = 1, asym_beta = 0;
  asym_cmd->add_option("--map", asym_map)->required();
  asym_cmd->add_option("--alpha", asym_alpha)->required();
  asym_cmd->add_option("--beta", asym_beta)->required();
  asym_cmd->add_option("--phi", asym_phi, "univariate polynomial in X, e.g. \"X^2 - 1/2\"");

  // domain
  auto* domain_cmd = app.add_subcommand("domain", "build a characteristic domain");
  double domain_radius = 8.0;
  int domain_slices = 3, domain_stars = 10;
  std::string domain_polydisk;
  std::uint64_t domain_geom_seed = 0;
  domain_cmd->add_option("--radius", domain_radius, "ball radius");
  domain_cmd->add_option("--polydisk", domain_polydisk, "rx,ry instead of a ball");
  domain_cmd->add_option("--slices", domain_slices);
  domain_cmd->add_option("--stars", domain_stars, "stars per slice");
  domain_cmd->add_option("--geometry-seed", domain_geom_seed);

  // metric
  auto* metric_cmd = app.add_subcommand("metric", "estimate rho_D between two maps");
  std::string metric_g1, metric_g2, metric_domain, metric_inv1, metric_inv2;
  metric_cmd->add_option("--g1", metric_g1)->required();
  metric_cmd->add_option("--g2", metric_g2)->required();
  metric_cmd->add_option("--domain", metric_domain)->required();
  metric_cmd->add_option("--inv1", metric_inv1, "exact inverse of g1 (enables the fast path)");
  metric_cmd->add_option("--inv2", metric_inv2, "exact inverse of g2");

  // probe
  auto* probe_cmd = app.add_subcommand("probe", "composition-operator injectivity probe");
  std::string probe_side, probe_map;
  int probe_trials = 100;
  probe_cmd->add_option("side", probe_side, "left or right")->required();
  probe_cmd->add_option("--map", probe_map)->required();
  probe_cmd->add_option("--trials", probe_trials);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "degree-based primality classification");
  std::string classify_map;
  classify_cmd->add_option("--map", classify_map)->required();

  // iterate
  auto* iterate_cmd = app.add_subcommand("iterate", "exact n-fold self-composition");
  std::string iterate_map_path;
  int iterate_n = 2;
  long long iterate_cap = 256;
  iterate_cmd->add_option("--map", iterate_map_path)->required();
  iterate_cmd->add_option("-n,--times", iterate_n)->required();
  iterate_cmd->add_option("--cap", iterate_cap, "degree growth cap");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "paper-scale experiments");
  std::string exp_kind, exp_domain, exp_map;
  int exp_triples = 20;
  long exp_oracle_samples = 40000;
  exp_cmd->add_option("kind", exp_kind,
                      "isometry|contraction|bounds|degree-mult|metric-axioms|volume-oracle")
      ->required();
  exp_cmd->add_option("--domain", exp_domain, "domain JSON (built on the fly if omitted)");
  exp_cmd->add_option("--map", exp_map, "map input for degree-mult / volume-oracle");
  exp_cmd->add_option("--triples", exp_triples, "number of random triples / trials");
  exp_cmd->add_option("--oracle-samples", exp_oracle_samples);

  // Global flags (--seed, --samples, --threads, --out) are accepted after the
  // subcommand name as well.
  for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
    sc->fallthrough();

  app.parse(argc, argv);
  const std::uint64_t seed = resolve_seed(seed_flag);

  if (*fiber_cmd) {
    CsvOut out(out_path);
    FiberResult fr = solve_fiber(load_map(fiber_map), parse_target(fiber_target));
    if (fr.status == FiberStatus::Degenerate)
      throw DegenerateFiberError("degenerate fiber (positive-dimensional solution set?)");
    out.line("target,count,points,residual_max,bezout_bound,seed,n,std_error");
    double rmax = 0.0;
    for (double r : fr.residuals) rmax = std::max(rmax, r);
    std::ostringstream row;
    row << '"' << fmt(fr.target.first.real()) << ',' << fmt(fr.target.first.imag()) << ','
        << fmt(fr.target.second.real()) << ',' << fmt(fr.target.second.imag()) << '"' << ','
        << fr.count() << ',' << '"' << points_field(fr.points) << '"' << ',' << fmt(rmax) << ','
        << fr.bezout_bound << ',' << seed << ',' << 1 << ',' << 0;
    out.line(row.str());
    return kOk;
  }

  if (*degree_cmd) {
    CsvOut out(out_path);
    DegreeOptions opts;
    opts.k_targets = degree_targets;
    DegreeEstimate est = geometric_degree(load_map(degree_map), seed, opts);
    out.line("d,samples,confident,histogram,seed,n,std_error");
    std::ostringstream hist;
    bool first = true;
    for (auto [size, count] : est.histogram) {
      if (!first) hist << ';';
      first = false;
      hist << size << ':' << count;
    }
    std::ostringstream os;
    os << est.d << ',' << est.samples << ',' << (est.confident ? 1 : 0) << ',' << '"'
       << hist.str() << '"' << ',' << seed << ',' << est.samples << ',' << 0;
    out.line(os.str());
    return kOk;
  }

  if (*compose_cmd) {
    const PolyMapQ h = compose(load_map(compose_f), load_map(compose_g));
    if (out_path.empty())
      std::cout << map_to_json_string(h);
    else
      save_map(h, out_path);
    return kOk;
  }

  if (*check_cmd) {
    const PolyMapQ f = load_map(check_map);
    NormalizationReport rep = is_keller_normalized(f);
    CsvOut out(out_path);
    if (check_normalize) {
      const PolyMapQ n = normalize_by_shear(f);
      std::cout << map_to_json_string(n);
      return kOk;
    }
    out.line("det_is_one,p_ydeg_matches,q_ydeg_matches,strict,relaxed,seed,n,std_error");
    std::ostringstream os;
    os << rep.det_is_one << ',' << rep.p_ydeg_matches << ',' << rep.q_ydeg_matches << ','
       << rep.strict() << ',' << rep.relaxed() << ',' << seed << ',' << 1 << ',' << 0;
    out.line(os.str());
    return kOk;
  }

  if (*asym_cmd) {
    const PolyMapQ f = load_map(asym_map);
    CanonicalRational r{asym_alpha, asym_beta, UniPolyQ::parse(asym_phi)};
    CanonicalCheck chk = check_canonical(asym_alpha, asym_beta, r.phi);
    LaurentMapPair s = substitute(f, r);
    std::cout << "canonical: " << (chk.ok ? "yes" : ("no (" + chk.reason + ")")) << "\n";
    std::cout << "first  = " << s.first.str() << "\n";
    std::cout << "second = " << s.second.str() << "\n";
    std::cout << "polynomial: " << (s.is_polynomial() ? "yes" : "no") << "\n";
    if (s.is_polynomial()) {
      const PolyMapQ dual = dual_map(f, r);
      if (out_path.empty())
        std::cout << map_to_json_string(dual);
      else
        save_map(dual, out_path);
    }
    return kOk;
  }

  if (*domain_cmd) {
    CharacteristicDomain d;
    if (!domain_polydisk.empty()) {
      double rx, ry;
      char extra;
      if (std::sscanf(domain_polydisk.c_str(), "%lf,%lf%c", &rx, &ry, &extra) != 2)
        throw ParseError("--polydisk expects rx,ry");
      d = build_polydisk_domain(rx, ry, domain_slices, domain_stars, domain_geom_seed);
    } else {
      d = build_domain(domain_radius, domain_slices, domain_stars, domain_geom_seed);
    }
    if (out_path.empty())
      std::cout << domain_to_json_string(d);
    else
      save_domain(d, out_path);
    return kOk;
  }

  if (*metric_cmd) {
    CsvOut out(out_path);
    const MapChain g1 = load_chain(metric_g1, metric_inv1);
    const MapChain g2 = load_chain(metric_g2, metric_inv2);
    const CharacteristicDomain d = load_domain(metric_domain);
    McOptions opts;
    opts.samples = samples;
    opts.seed = seed;
    opts.threads = threads;
    MetricEstimate est = rho(g1, g2, d, opts);
    out.line(metric_header());
    out.line(metric_row(est));
    return kOk;
  }

  if (*probe_cmd) {
    if (probe_side != "left" && probe_side != "right")
      throw std::invalid_argument("probe side must be 'left' or 'right'");
    const PolyMapQ f = load_map(probe_map);
    OperatorProbe probe = probe_side == "left" ? left_injectivity_probe(f, probe_trials, seed)
                                               : right_injectivity_probe(f, probe_trials, seed);
    CsvOut out(out_path);
    out.line("side,trials,collisions,seed,n,std_error");
    long collisions = 0;
    for (bool v : probe.verdicts)
      if (!v) ++collisions;
    std::ostringstream os;
    os << probe_side << ',' << probe.verdicts.size() << ',' << collisions << ',' << seed << ','
       << probe.verdicts.size() << ',' << 0;
    out.line(os.str());
    if (collisions > 0) throw AssertionFailure("composition operator collision (theorem violation)");
    return kOk;
  }

  if (*classify_cmd) {
    PrimalityReport rep = primality_classify(MapChain(load_map(classify_map)), seed);
    CsvOut out(out_path);
    out.line("d,classification,confident,seed,n,std_error");
    const char* kind = rep.classification == PrimalityClass::Unit          ? "unit"
                       : rep.classification == PrimalityClass::PrimeDegree ? "prime-degree"
                                                                           : "composite-degree";
    std::ostringstream os;
    os << rep.degree.d << ',' << kind << ',' << (rep.degree.confident ? 1 : 0) << ',' << seed
       << ',' << rep.degree.samples << ',' << 0;
    out.line(os.str());
    return kOk;
  }

  if (*iterate_cmd) {
    const PolyMapQ fn = iterate_map(load_map(iterate_map_path), iterate_n, iterate_cap);
    if (out_path.empty())
      std::cout << map_to_json_string(fn);
    else
      save_map(fn, out_path);
    return kOk;
  }

  if (*exp_cmd) {
    ExperimentArgs a;
    a.samples = samples;
    a.seed = seed;
    a.threads = threads;
    a.triples = exp_triples;
    a.oracle_samples = exp_oracle_samples;
    a.out = out_path;
    a.map_path = exp_map;
    a.domain = exp_domain.empty() ? build_domain(2.0, 3, 10, 1) : load_domain(exp_domain);
    if (exp_kind == "isometry") return run_isometry(a);
    if (exp_kind == "contraction") return run_contraction(a);
    if (exp_kind == "bounds") return run_bounds(a);
    if (exp_kind == "degree-mult") return run_degree_mult(a);
    if (exp_kind == "metric-axioms") return run_metric_axioms(a);
    if (exp_kind == "volume-oracle") return run_volume_oracle(a);
    throw ParseError("unknown experiment kind: " + exp_kind);
  }

  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kOk;  // --help and friends
    std::cerr << e.what() << "\n";
    return kParseFailure;
  } catch (const ParseError& e) {
    std::cerr << "parse failure: " << e.what() << "\n";
    return kParseFailure;
  } catch (const DegenerateOverflowError& e) {
    std::cerr << "degenerate-fiber overflow: " << e.what() << "\n";
    return kDegenerateOverflow;
  } catch (const DegenerateFiberError& e) {
    std::cerr << "degenerate fiber: " << e.what() << "\n";
    return kDegenerateOverflow;
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failure: " << e.what() << "\n";
    return kAssertionFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "precondition failure: " << e.what() << "\n";
    return kPreconditionFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAssertionFailure;
  }
}
