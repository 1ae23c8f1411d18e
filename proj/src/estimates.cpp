#include "expweb/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "expweb/geometry.hpp"
#include "expweb/kernels.hpp"
#include "expweb/parallel.hpp"
#include "expweb/sampling.hpp"

namespace expweb {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kChunk = 1024;

struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  std::size_t index = 0;

  void offer(double m, std::size_t i) {
    if (m < margin || std::isnan(m)) {
      margin = std::isnan(m) ? -std::numeric_limits<double>::infinity() : m;
      index = i;
    }
  }
};

// Halton points of R_0(nu) inside the window nu <= Re z <= nu + depth, rotated
// into sector p.  Rejection keeps going until `count` points are accepted.
std::vector<cplx> sector_points(const RegionDecomposition& dec, int p, double depth, std::size_t count,
                                std::uint64_t seed) {
  const int n = dec.order();
  const double x0 = dec.nu();
  const double x1 = dec.nu() + depth;
  const double half_height = x1 * std::tan(kPi / n);
  const cplx rotate = std::conj(dec.function().omega(p));
  const ShiftedHalton halton(seed);
  std::vector<cplx> out;
  out.reserve(count);
  const std::uint64_t max_tries = 1000 * static_cast<std::uint64_t>(count) + 1000;
  for (std::uint64_t i = 0; out.size() < count; ++i) {
    if (i >= max_tries) throw Error(ErrorCode::NotFound, "sampling window misses the sector");
    const auto u = halton.point(i);
    const cplx z(x0 + u[0] * (x1 - x0), (2.0 * u[1] - 1.0) * half_height);
    const Location loc = dec.locate(z);
    if (loc.kind == RegionKind::InComponent && loc.index == 0) out.push_back(z * rotate);
  }
  return out;
}

std::array<double, 5> margins_at(const ExpSum& f, int p, const PsiJet& jet, const cplx& z, double nu, double eta,
                                 double eps0) {
  const FactoredJet fj = factored_jet(f, p, jet, z);
  const double psi_max = std::max({std::abs(jet.value), std::abs(jet.d1), std::abs(jet.d2)});
  const double log_f = fj.log_abs_f();
  const double rhs = std::max(eps0 * nu, eps0 * std::abs(z) + std::log(f.sum_abs_coeff()));
  return {
      1.0 - eta * psi_max,
      1.0 - std::exp(std::log(2.0) - fj.log_abs_fprime()),
      1.0 - fj.nonlinearity_ratio() / 2.0,
      1.0 - 2.0 / (std::abs(z) * fj.log_derivative_ratio()),
      1.0 - std::exp(rhs - log_f),
  };
}

}  // namespace

double default_tau(const ExpSum& f, double eta) {
  const int n = f.order();
  return std::log(4.0 * n * eta * f.max_abs_coeff() / f.min_abs_coeff()) / (2.0 * std::sin(kPi / n));
}

double default_eps0(int n) { return 0.45 * std::cos(kPi / n); }

const char* inequality_id(Inequality q) noexcept {
  switch (q) {
    case Inequality::PsiSmall: return "eqDp2";
    case Inequality::UniformExpansion: return "uniform_expansion";
    case Inequality::BoundedNonlinearity: return "bounded_nonlinearity";
    case Inequality::ThereIsLambda: return "there_is_lambda";
    case Inequality::ThereIsEpsilon: return "there_is_epsilon";
  }
  return "?";
}

bool EstimateReport::all_pass() const noexcept {
  return !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

double EstimateReport::min_margin() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : results) m = std::min(m, r.worst_margin);
  return m;
}

EstimateReport verify_component_estimates(const ExpSum& f, double nu, const EstimateOptions& opts) {
  const int n = f.order();
  if (n < 3) throw Error(ErrorCode::PreconditionViolated, "component estimates need n >= 3");
  if (!(opts.eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "eta must be positive");
  if (opts.samples == 0) throw Error(ErrorCode::InvalidArgument, "samples must be positive");

  EstimateReport rep;
  rep.function = f.describe();
  rep.nu = nu;
  rep.eta = opts.eta;
  rep.tau = opts.tau.value_or(default_tau(f, opts.eta));
  rep.eps0 = opts.eps0.value_or(default_eps0(n));
  rep.seed = opts.seed;
  rep.samples_per_sector = opts.samples;

  // Keep every window point inside the disc where each term is finite, so
  // the sampled values can be cross-checked by direct evaluation.
  const double reach = evaluable_radius(f) * std::cos(kPi / n) - nu;
  rep.window_depth = std::min(std::max(10.0, nu), reach);
  rep.window_clipped = rep.window_depth < std::max(10.0, nu);
  if (!(rep.window_depth > 0.0)) throw Error(ErrorCode::Overflow, "sampling window is empty at this nu");

  const RegionDecomposition dec(f, nu, rep.tau);
  const simd::Isa isa = simd::active_isa();

  std::array<Worst, 5> worst;
  std::array<int, 5> worst_sector{};
  std::array<cplx, 5> witness{};
  for (int p = 0; p < n; ++p) {
    const std::vector<cplx> pts =
        sector_points(dec, p, rep.window_depth, opts.samples, opts.seed * 1000003ULL + static_cast<std::uint64_t>(p));
    const simd::PsiPlan plan = simd::make_psi_plan(f, p);
    const std::size_t chunks = chunk_count(pts.size(), kChunk);
    std::vector<std::array<Worst, 5>> per_chunk(chunks);
    parallel_chunks(pts.size(), kChunk, opts.workers, [&](std::size_t c, std::size_t b, std::size_t e) {
      std::vector<double> xr(e - b), xi(e - b);
      for (std::size_t i = b; i < e; ++i) {
        xr[i - b] = pts[i].real();
        xi[i - b] = pts[i].imag();
      }
      simd::PsiBatch batch;
      batch.resize(e - b);
      const std::size_t ok = simd::psi_batch(isa, plan, xr, xi, batch);
      if (ok != e - b) throw Error(ErrorCode::Overflow, "psi ratio overflow inside a sector");
      for (std::size_t i = b; i < e; ++i) {
        const auto m = margins_at(f, p, batch.jet(i - b), pts[i], nu, rep.eta, rep.eps0);
        for (std::size_t q = 0; q < 5; ++q) per_chunk[c][q].offer(m[q], i);
      }
    });
    for (const auto& chunk : per_chunk) {
      for (std::size_t q = 0; q < 5; ++q) {
        if (chunk[q].margin < worst[q].margin) {
          worst[q] = chunk[q];
          worst_sector[q] = p;
          witness[q] = pts[chunk[q].index];
        }
      }
    }
  }

  for (std::size_t q = 0; q < 5; ++q) {
    InequalityResult r;
    r.id = kAllInequalities[q];
    r.worst_margin = worst[q].margin;
    r.pass = worst[q].margin > 0.0;
    r.witness = witness[q];
    r.witness_sector = worst_sector[q];
    r.samples = opts.samples * static_cast<std::size_t>(n);
    rep.results.push_back(r);
  }
  return rep;
}

double find_nu_prime(const ExpSum& f, const NuPrimeOptions& opts) {
  if (f.order() < 3) throw Error(ErrorCode::PreconditionViolated, "the threshold search needs n >= 3");
  auto good = [&](double nu) {
    return verify_component_estimates(f, nu, opts.estimates).min_margin() >= opts.required_margin;
  };
  // Below tau / sin(pi/n) neighbouring strips overlap outside the polygon
  // and the sectors stop being separate components.
  const int n = f.order();
  const double tau = opts.estimates.tau.value_or(default_tau(f, opts.estimates.eta));
  const double floor = tau / std::sin(kPi / n) * (1.0 + 1e-9);
  double hi = std::max(opts.start, floor);
  double lo = 0.0;
  while (!good(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > opts.ceiling) {
      throw Error(ErrorCode::NotFound, "no threshold below nu=" + std::to_string(opts.ceiling));
    }
  }
  if (lo == 0.0) return hi;
  while (hi - lo > opts.resolution) {
    const double mid = 0.5 * (lo + hi);
    (good(mid) ? hi : lo) = mid;
  }
  return hi;
}

double Square::diameter() const noexcept { return side * std::numbers::sqrt2; }

double sup_nonlinearity_ratio(const ExpSum& f, const Square& box, int grid) {
  if (!(box.side > 0.0)) throw Error(ErrorCode::InvalidArgument, "box side must be positive");
  grid = std::max(grid, 2);
  double sup = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const cplx z = box.at(static_cast<double>(i) / (grid - 1), static_cast<double>(j) / (grid - 1));
      const FactoredJet fj = factored_jet(f, f.dominant_term(z), z);
      if (std::abs(fj.h1) == 0.0) {
        throw Error(ErrorCode::DerivativeZero, "f' vanishes at (" + std::to_string(z.real()) + ", " +
                                                   std::to_string(z.imag()) + ")");
      }
      sup = std::max(sup, fj.nonlinearity_ratio());
    }
  }
  return sup;
}

double nonlinearity(const ExpSum& f, const Square& box, int grid) {
  return sup_nonlinearity_ratio(f, box, grid) * box.diameter();
}

bool conformality_criterion(double side, double sup_ratio, double required_margin) {
  const double rhs = 1.0 / (std::numbers::sqrt2 * side + 1.0);
  return side * sup_ratio <= (1.0 - required_margin) * rhs;
}

ConformalityResult conformality_check(const ExpSum& f, const Square& box, int injectivity_samples) {
  ConformalityResult out;
  out.lhs = box.side * sup_nonlinearity_ratio(f, box);
  out.rhs = 1.0 / (std::numbers::sqrt2 * box.side + 1.0);
  out.margin = 1.0 - out.lhs / out.rhs;
  out.criterion = out.margin >= 0.1;

  // Images rescaled by a common factor so boxes far out stay finite.
  const int p = f.dominant_term(box.center);
  const double scale = factored_jet(f, p, box.center).log_pivot.real();
  const ShiftedHalton halton(17);
  std::vector<cplx> pts, img;
  for (int i = 0; i < injectivity_samples; ++i) {
    const auto u = halton.point(static_cast<std::uint64_t>(i));
    const cplx z = box.at(u[0], u[1]);
    const FactoredJet fj = factored_jet(f, p, z);
    pts.push_back(z);
    img.push_back(std::exp(fj.log_pivot - scale) * fj.h0);
  }
  out.injective = true;
  for (std::size_t i = 0; i < pts.size() && out.injective; ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i] == pts[j]) continue;
      if (std::abs(img[i] - img[j]) <= 1e-12 * std::max(std::abs(img[i]), std::abs(img[j]))) {
        out.injective = false;
        break;
      }
    }
  }
  out.pass = out.criterion && out.injective;
  return out;
}

DistortionEstimate distortion_estimate(const ExpSum& f, int k, const Square& box, std::size_t pair_samples,
                                       std::uint64_t seed) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "iterate depth must be nonnegative");
  if (k == 0 || pair_samples == 0) return {1.0, 1.0, 1.0};
  std::mt19937_64 rng = chunk_engine(seed, 0, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t s = 0; s < pair_samples; ++s) {
    const cplx x = box.at(unit(rng), unit(rng));
    const cplx y = box.at(unit(rng), unit(rng));
    if (x == y) continue;
    cplx u = x, v = y;
    for (int step = 1; step < k; ++step) {
      u = evaluate(f, u);
      v = evaluate(f, v);
    }
    // Final step relative to a shared pivot: log|F(x) - F(y)| without overflow.
    const int p = f.dominant_term(u);
    const FactoredJet ju = factored_jet(f, p, u);
    const FactoredJet jv = factored_jet(f, p, v);
    const double base = ju.log_pivot.real();
    const cplx diff = std::exp(ju.log_pivot - base) * ju.h0 - std::exp(jv.log_pivot - base) * jv.h0;
    const double log_ratio = std::log(std::abs(diff)) + base - std::log(std::abs(x - y));
    lo = std::min(lo, log_ratio);
    hi = std::max(hi, log_ratio);
  }
  return {std::exp(lo), std::exp(hi), std::exp(hi - lo)};
}

double distortion_product_bound(double M, double s, double alpha) {
  if (!(M > 0.0)) throw Error(ErrorCode::PreconditionViolated, "M must be positive");
  if (!(alpha > 1.0)) throw Error(ErrorCode::PreconditionViolated, "alpha must exceed 1");
  if (!(s > 0.0) || !(s < 1.0 / (4.0 * std::numbers::sqrt2 * M))) {
    throw Error(ErrorCode::PreconditionViolated, "s must lie in (0, 1/(4 sqrt(2) M))");
  }
  const double first = 8.0 * M * s * std::numbers::sqrt2;
  double lambda = 1.0;
  double term = first;
  while (term >= 1e-12) {
    lambda *= 1.0 + term;
    term /= alpha;
  }
  return lambda;
}

GrowthCheck bk_condition_check(const ExpSum& f, double C, double r_lo, double r_hi, int samples) {
  if (!(C > 1.0)) throw Error(ErrorCode::InvalidArgument, "C must exceed 1");
  if (!(r_lo > 0.0) || r_hi < r_lo) throw Error(ErrorCode::InvalidArgument, "bad radius range");
  samples = std::max(samples, 2);
  GrowthCheck out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), false};
  for (int i = 0; i < samples; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / (samples - 1);
    const double q = log_max_modulus(f, C * r) / log_max_modulus(f, r);
    out.A = std::min(out.A, q);
    out.B = std::max(out.B, q);
  }
  out.pass = out.A > 1.0 && out.B > 1.0 && std::isfinite(out.B);
  return out;
}

}  // namespace expweb
