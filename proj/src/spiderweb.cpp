#include "expweb/spiderweb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace expweb {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Explicit polygons are built only while phases Im(w^k z) keep ~1e-6 accuracy.
constexpr double kExplicitLimit = 1e10;
// The closest boundary point of P'(nu) is a side midpoint at distance exactly
// nu; this factor absorbs the rounding of that distance.
constexpr double kApothemRounding = 1.0 - 1e-12;
constexpr int kMaxBisections = 60;

int wrap_index(int k, int n) { return ((k % n) + n) % n; }

// Edge e of P' runs from vertex e to vertex e+1.  Even edges are the chords
// A_j B_j, odd edges lie on the side facing component -(j+1).
int edge_sector(int e, int n) { return e % 2 == 0 ? wrap_index(-(e / 2), n) : wrap_index(-(e / 2) - 1, n); }

double log_abs_f(const ExpSum& f, const cplx& z) {
  return factored_jet(f, f.dominant_term(z), z).log_abs_f();
}

struct BoundaryScan {
  double log_min = kInf;
  cplx witness;
  std::vector<double> edge_min;
  std::size_t samples = 0;
};

BoundaryScan scan_boundary(const ExpSum& f, const ClosedPolyline& poly, int samples) {
  const std::size_t nv = poly.vertices.size();
  const int per_edge = std::max(2, samples / static_cast<int>(nv));
  BoundaryScan s;
  s.edge_min.assign(nv, kInf);
  for (std::size_t e = 0; e < nv; ++e) {
    const cplx a = poly.vertices[e];
    const cplx b = poly.vertices[(e + 1) % nv];
    for (int i = 0; i < per_edge; ++i) {
      const cplx z = a + (static_cast<double>(i) / per_edge) * (b - a);
      const double v = log_abs_f(f, z);
      ++s.samples;
      s.edge_min[e] = std::min(s.edge_min[e], v);
      if (v < s.log_min) {
        s.log_min = v;
        s.witness = z;
      }
    }
  }
  return s;
}

// log M(s) bounds: measured while evaluable, analytic beyond.
LogBounds log_m(const ExpSum& f, double s) {
  if (s <= evaluable_radius(f)) {
    const double v = log_max_modulus(f, s);
    return {v, v};
  }
  return max_modulus_log_bounds(f, s);
}

struct NeumaierSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Argument increment of f along [za, zb] using pivot p, if h = f / (a_p e^{w^p z})
// provably keeps a positive real part on the whole piece.  Each ratio term is
// exp(linear), so its modulus is extremal at the ends and its phase moves
// linearly; a term whose phase stays inside (-pi/2, pi/2) contributes a
// positive real part.
std::optional<double> piece_increment(const ExpSum& f, int p, const cplx& za, const cplx& zb) {
  const int n = f.order();
  const cplx dz = zb - za;
  double re_lo = 1.0;
  cplx ha = 1.0, hb = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k == p) continue;
    const cplx c = std::log(f.coeff(k) / f.coeff(p));
    const cplx d = f.omega(k) - f.omega(p);
    const cplx ea = c + d * za;
    const cplx eb = c + d * zb;
    const double phase_a = std::remainder(ea.imag(), 2.0 * kPi);
    const double phase_b = phase_a + (d * dz).imag();
    const double m_lo = std::min(ea.real(), eb.real());
    const double m_hi = std::max(ea.real(), eb.real());
    if (std::max(std::abs(phase_a), std::abs(phase_b)) < kPi / 2) {
      re_lo += std::exp(m_lo) * std::min(std::cos(phase_a), std::cos(phase_b));
    } else {
      re_lo -= std::exp(m_hi);
    }
    if (!(re_lo > -1e300)) return std::nullopt;
    ha += std::exp(cplx(ea.real(), phase_a));
    hb += std::exp(cplx(eb.real(), phase_b));
  }
  if (!(re_lo > 1e-9)) return std::nullopt;
  return (f.omega(p) * dz).imag() + (std::arg(hb) - std::arg(ha));
}

void accumulate_piece(const ExpSum& f, const cplx& za, const cplx& zb, int depth, NeumaierSum& total,
                      std::size_t& pieces) {
  const int n = f.order();
  const int first = f.dominant_term(0.5 * (za + zb));
  for (int i = 0; i < n; ++i) {
    const int p = (first + i) % n;
    if (const auto inc = piece_increment(f, p, za, zb)) {
      total.add(*inc);
      ++pieces;
      return;
    }
  }
  if (depth >= kMaxBisections) {
    throw Error(ErrorCode::WindingUnstable, "no dominant factorisation on a piece near " +
                                                std::to_string(za.real()) + "+" + std::to_string(za.imag()) + "i");
  }
  const cplx mid = 0.5 * (za + zb);
  accumulate_piece(f, za, mid, depth + 1, total, pieces);
  accumulate_piece(f, mid, zb, depth + 1, total, pieces);
}

WindingResult winding_once(const ExpSum& f, const ClosedPolyline& boundary, int base_pieces) {
  const std::size_t nv = boundary.vertices.size();
  const int per_edge = std::max(1, base_pieces / static_cast<int>(nv));
  NeumaierSum total;
  WindingResult r;
  for (std::size_t e = 0; e < nv; ++e) {
    const cplx a = boundary.vertices[e];
    const cplx b = boundary.vertices[(e + 1) % nv];
    for (int i = 0; i < per_edge; ++i) {
      const cplx za = a + (static_cast<double>(i) / per_edge) * (b - a);
      const cplx zb = i + 1 == per_edge ? b : a + (static_cast<double>(i + 1) / per_edge) * (b - a);
      accumulate_piece(f, za, zb, 0, total, r.segments);
    }
  }
  const double turns = total.value() / (2.0 * kPi);
  r.winding = std::llround(turns);
  r.residual = std::abs(turns - static_cast<double>(r.winding));
  return r;
}

ParamCheck make_check(std::string name, double value, double threshold) {
  return {std::move(name), value >= threshold, value, threshold};
}

}  // namespace

void require_web_order(const ExpSum& f) {
  if (f.order() < 3) {
    throw Error(ErrorCode::PreconditionViolated,
                "n = " + std::to_string(f.order()) +
                    ": for n in {1, 2} the function lies in the Eremenko-Lyubich class B, and for f in B the set "
                    "A_R(f) is not a spider's web");
  }
}

double web_kappa(int n, double tau) {
  return 2.0 * kPi / std::tan(kPi / n) + 2.0 * tau * std::sin(kPi / n);
}

EpsilonPrime epsilon_prime(const ExpSum& f, double nu, double tau, int boundary_samples) {
  require_web_order(f);
  const int n = f.order();
  const ClosedPolyline poly = truncated_polygon(f, nu, tau);
  const BoundaryScan s = scan_boundary(f, poly, boundary_samples);
  const double kappa = web_kappa(n, tau);
  EpsilonPrime out;
  out.samples = s.samples;
  out.witness = s.witness;
  out.log_min_side = kInf;
  out.log_min_chord = kInf;
  out.side_bound = true;
  out.chord_bound = true;
  for (int e = 0; e < 2 * n; ++e) {
    const double rel = s.edge_min[static_cast<std::size_t>(e)] - nu;
    const double half_a = std::log(0.5 * std::abs(f.coeff(edge_sector(e, n))));
    if (e % 2 == 0) {
      out.chord_log_min.push_back(rel);
      out.log_min_chord = std::min(out.log_min_chord, rel);
      out.chord_bound = out.chord_bound && rel >= half_a - kappa;
    } else {
      out.log_min_side = std::min(out.log_min_side, rel);
      out.side_bound = out.side_bound && rel >= half_a;
    }
  }
  out.value = (1.0 - kEpsilonMargin) * std::exp(std::min(out.log_min_side, out.log_min_chord));
  out.floor = (1.0 - kEpsilonMargin) * 0.5 * f.min_abs_coeff() * std::exp(-kappa);
  return out;
}

namespace {

// Worst gap of the delta chain on r >= R; with stop_early the scan ends at the
// first negative gap, which is enough to reject a trial R.
double delta_chain_gap(const ExpSum& f, double delta, double R, bool stop_early) {
  const double ld = std::log(delta);
  const double a1 = std::log(f.min_abs_coeff() / 2.0);
  const double a2 = std::log(f.sum_abs_coeff());
  const double r_end = std::max(4.0 * R, 4.0 / delta);
  double worst = kInf;
  for (double r = R; r <= r_end; r *= 1.05) {
    const LogBounds big = log_m(f, r);
    const LogBounds small = log_m(f, delta * r);
    worst = std::min(worst, (ld + big.lower) - (small.upper - ld));
    worst = std::min(worst, small.lower - ld - std::log(r));
    if (stop_early && worst < 0.0) return worst;
  }
  // Past r_end both gaps are increasing in r under the analytic bounds.
  worst = std::min(worst, (ld + r_end + a1) - (delta * r_end + a2 - ld));
  return std::min(worst, a1 + delta * r_end - ld - std::log(r_end));
}

}  // namespace

ParamCheck delta_chain(const ExpSum& f, double delta, double R) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  return make_check("delta_chain", delta_chain_gap(f, delta, R, false), 0.0);
}

bool WebParams::gates_pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const ParamCheck& c) { return c.pass; });
}

TowerReal WebParams::beta(const TowerReal& r, Rounding rounding) const {
  return r.exp(rounding).scale(epsilon_prime / 2.0, rounding);
}

WebParams make_web_params(const ExpSum& f, const WebOptions& opts) {
  require_web_order(f);
  WebParams p;
  p.eta = opts.eta;
  p.tau = default_tau(f, opts.eta);
  if (opts.nu_floor) {
    p.nu_floor = *opts.nu_floor;
  } else {
    NuPrimeOptions search;
    search.estimates.eta = opts.eta;
    search.estimates.samples = opts.search_samples;
    search.estimates.seed = opts.seed;
    search.estimates.workers = opts.workers;
    p.nu_floor = find_nu_prime(f, search);
  }
  // P'(nu) must exist and satisfy nu <= |z| <= 2 nu on its boundary.
  for (;;) {
    try {
      const ClosedPolyline g = truncated_polygon(f, p.nu_floor, p.tau);
      if (g.min_modulus() >= p.nu_floor * kApothemRounding && g.max_modulus() <= 2.0 * p.nu_floor) break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NuTooSmall) throw;
    }
    p.nu_floor *= 1.5;
    if (p.nu_floor > kExplicitLimit) throw Error(ErrorCode::ParamSearchFailed, "no constructible P'(nu)");
  }

  double eps = epsilon_prime(f, p.nu_floor, p.tau, opts.boundary_samples).value;
  EpsilonPrime at_nu;
  double chain_gap = 0.0;
  bool settled = false;
  for (int round = 1; round <= 10 && !settled; ++round) {
    p.fixed_point_rounds = round;
    p.delta = eps / (2.0 * f.sum_abs_coeff());
    if (!(p.delta > 0.0 && p.delta < 1.0)) throw Error(ErrorCode::ParamSearchFailed, "delta outside (0, 1)");
    double R = 1.0;
    while ((chain_gap = delta_chain_gap(f, p.delta, R, true)) < 0.0) {
      R *= 2.0;
      if (R > 1e6) throw Error(ErrorCode::ParamSearchFailed, "no R below 1e6 satisfies the delta chain");
    }
    p.R = R;
    p.nu = std::max(p.nu_floor, R / p.delta);
    if (p.nu > kExplicitLimit) throw Error(ErrorCode::ParamSearchFailed, "nu = R/delta is beyond the explicit range");
    at_nu = epsilon_prime(f, p.nu, p.tau, opts.boundary_samples);
    settled = at_nu.value >= eps;
    if (!settled) eps = at_nu.value;
  }
  p.epsilon_prime = eps;

  const ClosedPolyline g0 = truncated_polygon(f, p.nu, p.tau);
  p.checks.push_back(make_check("eps_prime_fixed_point", at_nu.value, eps));
  p.checks.push_back(make_check("eps_prime_above_floor", eps, at_nu.floor));
  p.checks.push_back({"side_bound", at_nu.side_bound, at_nu.log_min_side, 0.0});
  p.checks.push_back({"chord_bound", at_nu.chord_bound, at_nu.log_min_chord, 0.0});
  p.checks.push_back({"delta_in_unit_interval", p.delta > 0.0 && p.delta < 1.0, p.delta, 1.0});
  p.checks.push_back(make_check("delta_chain", chain_gap, 0.0));
  p.checks.push_back(make_check("nu_at_least_R_over_delta", p.nu, p.R / p.delta));
  p.checks.push_back(make_check("boundary_modulus_at_least_nu", g0.min_modulus(), p.nu * kApothemRounding));
  p.checks.push_back(make_check("boundary_modulus_at_most_2nu", 2.0 * p.nu, g0.max_modulus()));
  // beta(r) >= delta M(r): log(eps'/2) + r - log delta - log M(r) = log sum|a| + r - log M(r).
  double worst = kInf;
  for (double r = 0.01; r <= evaluable_radius(f); r *= 1.1) {
    worst = std::min(worst, std::log(f.sum_abs_coeff()) + r - log_max_modulus(f, r));
  }
  p.checks.push_back(make_check("beta_dominates_delta_M", worst, 0.0));
  return p;
}

std::vector<WebDomain> build_web_sequence(const ExpSum& f, const WebParams& params, int count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  std::vector<WebDomain> out;
  TowerReal lo = TowerReal::from_double(params.nu);
  TowerReal hi = lo;
  for (int n = 0; n < count; ++n) {
    WebDomain d{n, lo, hi, std::nullopt};
    const auto v = hi.to_double();
    if (v && *v <= kExplicitLimit) d.polygon = truncated_polygon(f, *lo.to_double(), params.tau);
    out.push_back(std::move(d));
    lo = params.beta(lo, Rounding::Down);
    hi = params.beta(hi, Rounding::Up);
  }
  return out;
}

std::vector<InclusionResult> verify_inclusion(const ExpSum& f, const WebParams& params, int n_max) {
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be nonnegative");
  std::vector<InclusionResult> out;
  TowerReal lo = TowerReal::from_double(params.nu);
  TowerReal hi = lo;
  const TowerReal r = TowerReal::from_double(params.R);
  out.push_back({0, params.nu >= params.R ? TriState::True : TriState::False, lo, r});
  if (n_max == 0) return out;
  const auto tower = iterate_max_modulus_tower(f, params.R, n_max);
  for (int n = 1; n <= n_max; ++n) {
    lo = params.beta(lo, Rounding::Down);
    hi = params.beta(hi, Rounding::Up);
    const IteratedBound& m = tower[static_cast<std::size_t>(n - 1)];
    out.push_back({n, certified_geq(lo, hi, m.lower, m.upper), lo, m.upper});
  }
  return out;
}

WindingResult image_winding(const ExpSum& f, const ClosedPolyline& boundary, int base_pieces) {
  if (boundary.vertices.size() < 3) throw Error(ErrorCode::InvalidArgument, "boundary needs three vertices");
  if (base_pieces < 1) throw Error(ErrorCode::InvalidArgument, "base_pieces must be positive");
  WindingResult prev = winding_once(f, boundary, base_pieces);
  int agreements = 0;
  for (int k = 1; k <= 6; ++k) {
    const WindingResult cur = winding_once(f, boundary, base_pieces << k);
    if (cur.residual > 1e-3 || prev.residual > 1e-3) {
      throw Error(ErrorCode::WindingUnstable, "accumulated argument is not close to a multiple of 2 pi");
    }
    agreements = cur.winding == prev.winding ? agreements + 1 : 0;
    prev = cur;
    if (agreements == 2) return prev;
  }
  throw Error(ErrorCode::WindingUnstable, "winding changed under refinement");
}

long long curve_winding(const std::vector<cplx>& curve, const cplx& centre) {
  if (curve.size() < 3) throw Error(ErrorCode::InvalidArgument, "curve needs three points");
  double total = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const cplx a = curve[i] - centre;
    const cplx b = curve[(i + 1) % curve.size()] - centre;
    if (a == 0.0 || b == 0.0) throw Error(ErrorCode::WindingUnstable, "curve passes through the centre");
    const double step = std::arg(b / a);
    if (std::abs(step) > 0.75 * kPi) throw Error(ErrorCode::WindingUnstable, "argument step too large");
    total += step;
  }
  return std::llround(total / (2.0 * kPi));
}

double winding_lower_bound(const ExpSum& f, double nu, double tau) {
  const ClosedPolyline g = truncated_polygon(f, nu, tau);
  const int n = f.order();
  const std::size_t nv = g.vertices.size();
  // On each edge arg f = arg a_p + Im(w^p z) + arg h with |arg h| < pi/2.
  double total = 0.0;
  for (std::size_t e = 0; e < nv; ++e) {
    const cplx dz = g.vertices[(e + 1) % nv] - g.vertices[e];
    total += (f.omega(edge_sector(static_cast<int>(e), n)) * dz).imag() - kPi;
  }
  return total / (2.0 * kPi);
}

WebStepReport verify_step(const ExpSum& f, const WebParams& params, const WebDomain& g_n, const WebDomain& g_next,
                          int boundary_samples) {
  WebStepReport r;
  r.n = g_n.n;
  if (g_next.polygon) {
    r.sup_next_radius = TowerReal::from_double(g_next.polygon->max_modulus());
  } else {
    r.sup_next_radius = g_next.nu_hi.scale(2.0, Rounding::Up);
  }
  if (g_n.polygon) {
    r.mode = "explicit";
    const BoundaryScan s = scan_boundary(f, *g_n.polygon, boundary_samples);
    const WindingResult w = image_winding(f, *g_n.polygon, boundary_samples);
    const double slack = 1e-12 * (1.0 + std::abs(s.log_min));
    r.min_mod_boundary = TowerReal::from_double(s.log_min - slack).exp(Rounding::Down);
    r.winding = w.winding;
    r.winding_nonzero = w.winding != 0;
    r.samples = s.samples + w.segments;
    r.pass_b = certified_geq(r.min_mod_boundary, r.min_mod_boundary, r.sup_next_radius, r.sup_next_radius) ==
                   TriState::True &&
               r.min_mod_boundary != r.sup_next_radius && r.winding_nonzero;
    r.note = "containment via modulus gap and nonzero winding";
    return r;
  }
  // Same real parameter on both sides: min|f| >= eps'/(1 - margin) e^{nu_n}
  // while sup|z| <= 2 beta(nu_n) = eps' e^{nu_n}.
  r.mode = "symbolic";
  r.min_mod_boundary = g_n.nu_lo.exp(Rounding::Down).scale(params.epsilon_prime / (1.0 - kEpsilonMargin),
                                                            Rounding::Down);
  const double bound = winding_lower_bound(f, params.nu, params.tau);
  r.winding_nonzero = bound > 0.0;
  r.pass_b = r.winding_nonzero && params.gates_pass();
  r.note = "eps' measured at nu = " + std::to_string(params.nu) +
           " extrapolated; winding >= " + std::to_string(bound) + " at that nu and grows with nu";
  return r;
}

WebCertificate certify_web(const ExpSum& f, const WebParams& params, int depth, int boundary_samples) {
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be nonnegative");
  WebCertificate c;
  c.params = params;
  c.depth_requested = depth;
  c.inclusion = verify_inclusion(f, params, std::max(depth, 6));
  const auto domains = build_web_sequence(f, params, depth + 1);
  for (int n = 0; n < depth; ++n) {
    WebStepReport s = verify_step(f, params, domains[static_cast<std::size_t>(n)],
                                  domains[static_cast<std::size_t>(n + 1)], boundary_samples);
    s.pass_a = c.inclusion[static_cast<std::size_t>(n)].verdict == TriState::True;
    c.steps.push_back(std::move(s));
  }
  if (params.gates_pass()) {
    for (int k = 0; k <= depth; ++k) {
      if (c.inclusion[static_cast<std::size_t>(k)].verdict != TriState::True) break;
      if (k > 0 && !c.steps[static_cast<std::size_t>(k - 1)].pass_b) break;
      c.depth_certified = k;
    }
  }
  c.certified = c.depth_certified >= depth;
  return c;
}

}  // namespace expweb
