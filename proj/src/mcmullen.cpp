#include "expweb/mcmullen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <tuple>

#include "expweb/geometry.hpp"
#include "expweb/kernels.hpp"
#include "expweb/parallel.hpp"
#include "expweb/sampling.hpp"

namespace expweb {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kChunk = 1 << 16;
// Above this log-modulus a point is handled purely in log coordinates.
constexpr double kLogFloatLimit = 600.0;

[[noreturn]] void search_failed(const std::string& what) { throw Error(ErrorCode::ParamSearchFailed, what); }

double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

enum class Fate { Survive, LostPolygon, LostStrip };

// Where an image point, given by its logarithm, sits relative to R(nu):
// inside the sector set with the required clearance, or too close to (or
// inside) the polygon or a strip.
class ImageTest {
 public:
  ImageTest(const ExpSum& f, double nu, double tau, double clearance)
      : dec_(f, nu, tau), poly_(polygon_boundary(dec_)), clearance_(clearance) {}

  Fate operator()(const cplx& log_w) const {
    const int n = dec_.order();
    if (log_w.real() < kLogFloatLimit) {
      const cplx w = std::exp(log_w);
      if (dec_.in_polygon(w) || poly_.distance_to_boundary(w) <= clearance_) return Fate::LostPolygon;
      for (int k = 0; k < n; ++k) {
        const cplx u = w * std::conj(dec_.strip_axis(k));
        if (u.real() > -clearance_ && std::abs(u.imag()) < dec_.tau() + clearance_) return Fate::LostStrip;
      }
      return Fate::Survive;
    }
    if (log_w.real() <= std::log(2.0 * dec_.circumradius() + clearance_)) return Fate::LostPolygon;
    const double reach = std::log(dec_.tau() + clearance_);
    for (int k = 0; k < n; ++k) {
      const double delta = wrap_angle(log_w.imag() - std::arg(dec_.strip_axis(k)));
      if (std::abs(delta) < kPi / 2 && log_w.real() + std::log(std::abs(std::sin(delta))) < reach) {
        return Fate::LostStrip;
      }
    }
    return Fate::Survive;
  }

 private:
  RegionDecomposition dec_;
  ClosedPolyline poly_;
  double clearance_;
};

double distance_to_box_edge(const cplx& z, const BoxId& box, double sigma) {
  const cplx ll = box.lower_left(sigma);
  const double dx = std::min(z.real() - ll.real(), ll.real() + sigma - z.real());
  const double dy = std::min(z.imag() - ll.imag(), ll.imag() + sigma - z.imag());
  return std::max(0.0, std::min(dx, dy));
}

// The image box around f(z) is cut by f(edge of K) when the image of the
// distance to the edge is below the box diameter.
bool in_frame(const cplx& z, const BoxId& box, double sigma, double log_abs_fprime) {
  const double d = distance_to_box_edge(z, box, sigma);
  return d == 0.0 || std::log(d) + log_abs_fprime <= std::log(sigma * std::numbers::sqrt2);
}

std::vector<ParamCheck> start_conditions(const ExpSum& f, double sigma, double tau, double eps0, double nu_prime,
                                         double nu0, double multiple) {
  std::vector<ParamCheck> out;
  out.push_back({"nu0_at_least_nu_prime", nu0 >= nu_prime, nu0, nu_prime});
  const double a = 0.5 * std::exp(eps0 * nu0);
  out.push_back({"alpha_exceeds_nu0", a > nu0, a, nu0});
  const double inner = 0.5 * sigma * std::exp(nu0) * f.min_abs_coeff();
  const double need = multiple * std::max(sigma, tau);
  out.push_back({"image_square_large", inner >= need, inner, need});

  // mu(r) = M(eps0 r) > r for r >= nu0: measured while M is evaluable, then
  // via log M(s) >= s + log(min|a|/2), whose excess over log r grows once
  // eps0 r > 1.
  double worst = kInf;
  double r = nu0;
  const double limit = evaluable_radius(f) / eps0;
  for (; r <= limit; r *= 1.05) worst = std::min(worst, log_max_modulus(f, eps0 * r) - std::log(r));
  const double r_tail = std::max({r, nu0, 1.0 / eps0});
  worst = std::min(worst, eps0 * r_tail + std::log(f.min_abs_coeff() / 2.0) - std::log(r_tail));
  out.push_back({"mu_expanding", worst > 0.0, worst, 0.0});
  return out;
}

bool all_pass(const std::vector<ParamCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const ParamCheck& c) { return c.pass; });
}

}  // namespace

double RefinementParams::alpha(double r) const noexcept { return 0.5 * std::exp(eps0_ * r); }

std::vector<double> RefinementParams::schedule(int count) const {
  std::vector<double> out;
  double v = nu0_;
  for (int k = 0; k < count; ++k) {
    out.push_back(v);
    v = std::isfinite(v) ? alpha(v) : kInf;
  }
  return out;
}

RefinementParams RefinementParams::unchecked_for_testing(double sigma, double eta, double tau, double eps0,
                                                         double nu0, std::uint64_t seed) {
  RefinementParams p;
  p.sigma_ = sigma;
  p.eta_ = eta;
  p.tau_ = tau;
  p.eps0_ = eps0;
  p.nu0_ = nu0;
  p.seed_ = seed;
  p.checked_ = false;
  return p;
}

RefinementParams make_params(const ExpSum& f, const ParamOverrides& ov) {
  const int n = f.order();
  if (n < 3) search_failed("the box construction needs n >= 3");
  const double sigma = ov.sigma.value_or(kDefaultSigma);
  if (!(sigma > 0.0 && sigma < 1.0 / (8.0 * std::numbers::sqrt2))) {
    search_failed("sigma = " + std::to_string(sigma) + " must lie in (0, 1/(8 sqrt 2))");
  }
  const double eta = ov.eta.value_or(kDefaultEta);
  if (!(eta > 4.0 / sigma)) search_failed("eta must exceed 4/sigma = " + std::to_string(4.0 / sigma));
  const double tau_min = default_tau(f, eta);
  const double tau = ov.tau.value_or(tau_min);
  if (!(tau >= tau_min * (1.0 - 1e-12))) search_failed("tau must be at least " + std::to_string(tau_min));
  const double eps0 = ov.eps0.value_or(default_eps0(n));
  if (!(eps0 > 0.0 && eps0 < 0.5 * std::cos(kPi / n))) search_failed("eps0 must lie in (0, cos(pi/n)/2)");

  double nu_prime = 0.0;
  if (ov.nu_prime) {
    nu_prime = *ov.nu_prime;
  } else {
    NuPrimeOptions search;
    search.estimates.eta = eta;
    search.estimates.tau = tau;
    search.estimates.eps0 = eps0;
    search.estimates.samples = ov.search_samples;
    search.estimates.seed = ov.seed;
    search.estimates.workers = ov.workers;
    try {
      nu_prime = find_nu_prime(f, search);
    } catch (const Error& e) {
      search_failed(std::string("threshold search: ") + e.what());
    }
  }

  auto conditions = [&](double nu0) {
    return start_conditions(f, sigma, tau, eps0, nu_prime, nu0, ov.large_multiple);
  };
  double nu0 = 0.0;
  std::vector<ParamCheck> checks;
  if (ov.nu0) {
    nu0 = *ov.nu0;
    checks = conditions(nu0);
    for (const auto& c : checks) {
      if (!c.pass) {
        search_failed("nu0 = " + std::to_string(nu0) + " violates " + c.name + " (" + std::to_string(c.value) +
                      " vs " + std::to_string(c.threshold) + ")");
      }
    }
  } else {
    double lo = 0.0;
    double hi = std::max(nu_prime, 1.0);
    while (!all_pass(checks = conditions(hi))) {
      lo = hi;
      hi *= 2.0;
      if (hi > 600.0) {
        for (const auto& c : checks) {
          if (!c.pass) search_failed("no nu0 below 600 satisfies " + c.name);
        }
      }
    }
    if (lo > 0.0) {
      while (hi - lo > 0.25) {
        const double mid = 0.5 * (lo + hi);
        (all_pass(conditions(mid)) ? hi : lo) = mid;
      }
      checks = conditions(hi);
    }
    nu0 = hi;
  }

  RefinementParams p;
  p.sigma_ = sigma;
  p.eta_ = eta;
  p.tau_ = tau;
  p.eps0_ = eps0;
  p.nu0_ = nu0;
  p.nu_prime_ = nu_prime;
  p.large_multiple_ = ov.large_multiple;
  p.seed_ = ov.seed;
  p.checked_ = true;
  p.checks_ = std::move(checks);
  return p;
}

BoxId BoxId::containing(const cplx& z, double sigma) {
  return {static_cast<long long>(std::floor(z.real() / sigma)), static_cast<long long>(std::floor(z.imag() / sigma))};
}

cplx BoxId::lower_left(double sigma) const noexcept {
  return {static_cast<double>(m) * sigma, static_cast<double>(m_prime) * sigma};
}

cplx BoxId::center(double sigma) const noexcept { return lower_left(sigma) + cplx(sigma / 2, sigma / 2); }

bool BoxId::contains(const cplx& z, double sigma) const noexcept {
  const cplx ll = lower_left(sigma);
  return z.real() > ll.real() && z.real() < ll.real() + sigma && z.imag() > ll.imag() && z.imag() < ll.imag() + sigma;
}

BoxFrame box_image_frame(const ExpSum& f, const BoxId& box, double sigma, double nu, double eta, double tau) {
  const RegionDecomposition dec(f, nu, tau);
  const cplx ll = box.lower_left(sigma);
  const std::array<cplx, 4> corners = {ll, ll + sigma, ll + cplx(sigma, sigma), ll + cplx(0.0, sigma)};
  const Location c = dec.locate(box.center(sigma));
  if (c.kind != RegionKind::InComponent) throw Error(ErrorCode::BoxNotInSector, "box centre is not in R(nu)");
  for (const cplx& z : corners) {
    if (dec.locate(z) != c) throw Error(ErrorCode::BoxNotInSector, "box crosses the boundary of R(nu)");
  }
  BoxFrame out;
  out.sector = c.index;
  const cplx a = f.coeff(c.index);
  const cplx w = f.omega(c.index);
  double re_lo = kInf, re_hi = -kInf, im_lo = kInf, im_hi = -kInf;
  for (const cplx& z : corners) {
    const cplx e = w * z;
    re_lo = std::min(re_lo, e.real());
    re_hi = std::max(re_hi, e.real());
    im_lo = std::min(im_lo, e.imag());
    im_hi = std::max(im_hi, e.imag());
  }
  out.inner_side = 0.5 * sigma * std::exp(nu) * f.min_abs_coeff();
  out.modulus_lo = std::abs(a) * std::exp(re_lo) * (1.0 - 1.0 / eta);
  out.modulus_hi = std::abs(a) * std::exp(re_hi) * (1.0 + 1.0 / eta);
  out.arg_lo = std::arg(a) + im_lo - 1.0 / eta;
  out.arg_hi = std::arg(a) + im_hi + 1.0 / eta;
  out.relative_band = 2.0 / eta;
  return out;
}

BoxId seed_box(const ExpSum& f, const RefinementParams& params) {
  const int n = f.order();
  const double sigma = params.sigma();
  const long long m0 = static_cast<long long>(std::floor(params.nu0() / sigma)) + 1;
  const RegionDecomposition dec(f, params.nu0(), params.tau());
  const double rho = std::abs(f.coeff(0)) * std::exp(static_cast<double>(m0) * sigma) * (1.0 - 1.0 / params.eta());
  // Angular room the image needs around each strip axis.
  const double room = std::asin(std::min(1.0, (params.tau() + 2.0 * sigma * std::numbers::sqrt2) / rho));
  for (long long k = 0; k < 2000; ++k) {
    const long long mp = (k % 2 == 0) ? -(k / 2) : (k + 1) / 2;
    const BoxId box{m0, mp};
    const cplx ll = box.lower_left(sigma);
    bool inside = true;
    for (const cplx& z : {ll, ll + sigma, ll + cplx(sigma, sigma), ll + cplx(0.0, sigma), box.center(sigma)}) {
      const Location loc = dec.locate(z);
      inside = inside && loc.kind == RegionKind::InComponent && loc.index == 0;
    }
    if (!inside) continue;
    const double lo = std::arg(f.coeff(0)) + ll.imag() - 1.0 / params.eta() - room;
    const double hi = lo + sigma + 2.0 / params.eta() + 2.0 * room;
    bool clear = true;
    for (int j = 0; j < n && clear; ++j) {
      const double axis = (1.0 - 2.0 * j) * kPi / n;
      const double offset = wrap_angle(axis - 0.5 * (lo + hi));
      clear = std::abs(offset) > 0.5 * (hi - lo);
    }
    if (clear) return box;
  }
  throw Error(ErrorCode::BoxNotInSector, "no seed box in R_0(nu0) with a strip-free image");
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.959964;
  const double nn = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (ph + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

SurvivalReport survival_fraction(const ExpSum& f, const RefinementParams& params, int level,
                                 const SurvivalOptions& opts) {
  if (level != 1 && level != 2) throw Error(ErrorCode::InvalidArgument, "survival level must be 1 or 2");
  if (opts.samples == 0) throw Error(ErrorCode::InvalidArgument, "samples must be positive");
  const double sigma = params.sigma();
  const double clearance = sigma * std::numbers::sqrt2;
  const std::vector<double> nu = params.schedule(3);
  if (!std::isfinite(nu[static_cast<std::size_t>(level)])) {
    throw Error(ErrorCode::Overflow, "nu_" + std::to_string(level) + " is beyond float range");
  }
  const BoxId k0 = seed_box(f, params);
  const ImageTest test1(f, nu[1], params.tau(), clearance);
  std::optional<ImageTest> test2;
  if (level == 2) test2.emplace(f, nu[2], params.tau(), clearance);

  const simd::Isa isa = simd::active_isa();
  const simd::PsiPlan plan = simd::make_psi_plan(f, 0);
  const cplx ll = k0.lower_left(sigma);

  struct Tally {
    std::size_t samples = 0, survivors = 0, strip = 0, polygon = 0, frame = 0;
    std::vector<cplx> kept;
  };
  const std::size_t chunks = chunk_count(opts.samples, kChunk);
  std::vector<Tally> tallies(chunks);
  parallel_chunks(opts.samples, kChunk, opts.workers, [&](std::size_t c, std::size_t b, std::size_t e) {
    std::mt19937_64 rng = chunk_engine(opts.seed, static_cast<std::uint64_t>(level), c);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t m = e - b;
    std::vector<double> xr(m), xi(m);
    for (std::size_t i = 0; i < m; ++i) {
      xr[i] = ll.real() + sigma * unit(rng);
      xi[i] = ll.imag() + sigma * unit(rng);
    }
    simd::PsiBatch batch;
    batch.resize(m);
    if (simd::psi_batch(isa, plan, xr, xi, batch) != m) throw Error(ErrorCode::Overflow, "psi overflow in K0");
    Tally& t = tallies[c];
    for (std::size_t i = 0; i < m; ++i) {
      const cplx z(xr[i], xi[i]);
      const FactoredJet fj = factored_jet(f, 0, batch.jet(i), z);
      const cplx log_w = fj.log_pivot + std::log(fj.h0);
      Fate fate = test1(log_w);
      bool frame = fate == Fate::Survive && in_frame(z, k0, sigma, fj.log_abs_fprime());
      if (level == 2 && fate == Fate::Survive && !frame) {
        ++t.samples;
        if (log_w.real() >= kMaxExponent) throw Error(ErrorCode::Overflow, "level-1 image beyond float range");
        const cplx w = std::exp(log_w);
        const int p = f.dominant_term(w);
        const FactoredJet gj = factored_jet(f, p, w);
        fate = (*test2)(gj.log_pivot + std::log(gj.h0));
        frame = fate == Fate::Survive && in_frame(w, BoxId::containing(w, sigma), sigma, gj.log_abs_fprime());
      } else if (level == 2) {
        continue;
      } else {
        ++t.samples;
      }
      if (fate == Fate::LostPolygon) {
        ++t.polygon;
      } else if (fate == Fate::LostStrip) {
        ++t.strip;
      } else if (frame) {
        ++t.frame;
      } else {
        ++t.survivors;
        if (t.kept.size() < opts.keep_survivors) t.kept.push_back(z);
      }
    }
  });

  SurvivalReport rep;
  rep.level = level;
  rep.seed = k0;
  rep.seed_value = opts.seed;
  for (const Tally& t : tallies) {
    rep.samples += t.samples;
    rep.survivors += t.survivors;
    rep.lost_strip += t.strip;
    rep.lost_polygon += t.polygon;
    rep.lost_frame += t.frame;
    for (const cplx& z : t.kept) {
      if (rep.survivor_sample.size() < opts.keep_survivors) rep.survivor_sample.push_back(z);
    }
  }
  rep.fraction = rep.samples ? static_cast<double>(rep.survivors) / static_cast<double>(rep.samples) : 0.0;
  std::tie(rep.wilson_lo, rep.wilson_hi) = wilson_interval(rep.survivors, rep.samples);

  if (!opts.dump_csv.empty()) {
    std::ofstream os(opts.dump_csv);
    if (!os) throw Error(ErrorCode::InvalidArgument, "cannot open " + opts.dump_csv);
    os << "re,im\n" << std::setprecision(17);
    for (const cplx& z : rep.survivor_sample) os << z.real() << "," << z.imag() << "\n";
  }
  return rep;
}

AreaBound area_lower_bound(const RefinementParams& params, double loss_constant, int levels) {
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "levels must be >= 1");
  if (!(loss_constant >= 0.0)) throw Error(ErrorCode::InvalidArgument, "loss constant must be nonnegative");
  AreaBound out;
  constexpr int kTailTerms = 1000;
  out.schedule = params.schedule(levels + kTailTerms);
  for (int k = 0; k < levels; ++k) {
    out.product *= 1.0 - std::min(1.0, loss_constant * std::exp(-out.schedule[static_cast<std::size_t>(k)]));
  }
  // The schedule reaches +inf within a handful of steps whenever it grows,
  // so summing the next terms explicitly covers the whole tail.
  bool converged = false;
  for (int k = levels; k < levels + kTailTerms; ++k) {
    const double t = loss_constant * std::exp(-out.schedule[static_cast<std::size_t>(k)]);
    out.tail += t;
    if (t == 0.0) {
      converged = true;
      break;
    }
  }
  if (!converged) out.tail = kInf;
  out.schedule.resize(static_cast<std::size_t>(levels) + 1);
  out.delta = out.product * std::max(0.0, 1.0 - out.tail);
  return out;
}

Classification certify_point(const ExpSum& f, const RefinementParams& params, const cplx& z, int depth) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  const double sigma = params.sigma();
  try {
    box_image_frame(f, BoxId::containing(z, sigma), sigma, params.nu0(), params.eta(), params.tau());
  } catch (const Error& e) {
    throw Error(ErrorCode::PreconditionViolated, std::string("point is not in a box of R(nu0): ") + e.what());
  }
  const OrbitRecord orbit = iterate_orbit(f, z, depth, {params.eta()});
  const std::vector<double> nu = params.schedule(depth + 1);
  Classification out;
  out.label = Label::Undetermined;
  const int reach = std::min(depth, orbit.depth_reached);
  out.depth = reach;
  if (reach == 0) {
    out.detail = "orbit could not be continued";
    return out;
  }
  for (int j = 1; j <= reach; ++j) {
    const double nu_j = nu[static_cast<std::size_t>(j)];
    if (!std::isfinite(nu_j)) break;
    const cplx log_w = j <= orbit.overflow_depth ? std::log(orbit.points[static_cast<std::size_t>(j)])
                                                 : *orbit.log_point;
    if (ImageTest(f, nu_j, params.tau(), 0.0)(log_w) != Fate::Survive) {
      out.witness_level = j;
      out.detail = "iterate " + std::to_string(j) + " leaves R(nu_" + std::to_string(j) + ")";
      return out;
    }
  }
  for (int j = 0; j < reach; ++j) {
    if (!(orbit.factors[static_cast<std::size_t>(j)] > 2.0)) {
      out.witness_level = j;
      out.detail = "expansion factor at iterate " + std::to_string(j) + " is not above 2";
      return out;
    }
  }
  const Comparison a = compare_orbit(orbit, iterate_mu_tower(f, params.eps0(), params.nu0(), depth), depth, 0);
  if (a.verdict != TriState::True) {
    out.witness_level = a.witness;
    out.detail = "orbit does not dominate mu^n(nu0)";
    return out;
  }
  out.label = Label::Julia;
  out.ell = 0;
  out.no_mcfc = true;
  out.detail = "Julia and InA(0) to depth " + std::to_string(reach);
  return out;
}

}  // namespace expweb
