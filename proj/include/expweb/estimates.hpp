#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expweb/expsum.hpp"

namespace expweb {

inline constexpr double kDefaultSigma = 0.08;
inline constexpr double kDefaultEta = 51.0;

// Strip half-width tau = log(4 n eta max|a| / min|a|) / (2 sin(pi/n)).
double default_tau(const ExpSum& f, double eta);
// 0.45 cos(pi/n), inside the admissible range (0, cos(pi/n)/2).
double default_eps0(int n);

enum class Inequality {
  PsiSmall,             // max(|psi|, |psi'|, |psi''|) <= 1/eta
  UniformExpansion,     // |f'| > 2
  BoundedNonlinearity,  // |f''/f'| < 2
  ThereIsLambda,        // |z f'/f| > 2
  ThereIsEpsilon,       // |f| > max(exp(eps0 nu), M(eps0 |z|))
};

inline constexpr std::array<Inequality, 5> kAllInequalities = {
    Inequality::PsiSmall, Inequality::UniformExpansion, Inequality::BoundedNonlinearity,
    Inequality::ThereIsLambda, Inequality::ThereIsEpsilon};

const char* inequality_id(Inequality q) noexcept;

struct InequalityResult {
  Inequality id = Inequality::PsiSmall;
  bool pass = false;
  // Relative slack: 1 - lhs/bound for upper bounds, 1 - bound/value for lower
  // bounds.  Positive means the inequality holds.
  double worst_margin = 0.0;
  cplx witness;
  int witness_sector = 0;
  std::size_t samples = 0;
};

struct EstimateOptions {
  double eta = kDefaultEta;
  std::optional<double> tau;
  std::optional<double> eps0;
  std::size_t samples = 10000;  // per sector
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct EstimateReport {
  std::string function;
  double nu = 0.0;
  double eta = 0.0;
  double tau = 0.0;
  double eps0 = 0.0;
  std::uint64_t seed = 0;
  std::size_t samples_per_sector = 0;
  // Radial extent of the sampling window beyond nu, and whether it had to
  // be clipped to stay inside the float-evaluable disc.
  double window_depth = 0.0;
  bool window_clipped = false;
  std::vector<InequalityResult> results;

  bool all_pass() const noexcept;
  double min_margin() const noexcept;
};

/// Samples every sector R_p(nu) with a shifted Halton set and measures the
/// five component inequalities.  Sampled extremes are inner estimates.
EstimateReport verify_component_estimates(const ExpSum& f, double nu, const EstimateOptions& opts);

struct NuPrimeOptions {
  EstimateOptions estimates;
  double start = 1.0;
  double ceiling = 512.0;
  double required_margin = 0.1;
  double resolution = 0.25;  // bisection stops when the bracket is this narrow
};

/// Least tested nu at which all inequalities hold with the required margin
/// (doubling then bisection), never below the point where the strips
/// separate.  Requires n >= 3; NotFound above the ceiling.
double find_nu_prime(const ExpSum& f, const NuPrimeOptions& opts);

// Axis-aligned closed square.
struct Square {
  cplx center;
  double side = 0.0;

  double diameter() const noexcept;
  cplx corner() const noexcept { return center - cplx(side / 2, side / 2); }
  // Point at fractional coordinates (u, v) in [0, 1]^2.
  cplx at(double u, double v) const noexcept { return corner() + cplx(u * side, v * side); }
};

// Sampled sup |f''/f'| over a square, on a (grid x grid) lattice.
double sup_nonlinearity_ratio(const ExpSum& f, const Square& box, int grid = 32);

/// N(f|box) = sampled sup |f''/f'| times the box diameter.  Throws
/// DerivativeZero if f' vanishes at a sample.
double nonlinearity(const ExpSum& f, const Square& box, int grid = 32);

// s * sup <= 1 / (sqrt(2) s + 1), demanding the given relative margin.
bool conformality_criterion(double side, double sup_ratio, double required_margin = 0.1);

struct ConformalityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool criterion = false;
  bool injective = false;
  bool pass = false;
};

ConformalityResult conformality_check(const ExpSum& f, const Square& box, int injectivity_samples = 1000);

struct DistortionEstimate {
  double c = 0.0;  // min |F(x) - F(y)| / |x - y|
  double C = 0.0;  // max
  double L = 1.0;  // C / c, a lower estimate of the true distortion
};

/// Distortion of the k-th iterate on the box from sampled point pairs.
DistortionEstimate distortion_estimate(const ExpSum& f, int k, const Square& box, std::size_t pair_samples,
                                       std::uint64_t seed);

/// prod_{m >= 0} (1 + 8 M s sqrt(2) alpha^{-m}), stopped once a factor is
/// within 1e-12 of 1.  Requires 0 < s < 1/(4 sqrt(2) M) and alpha > 1.
double distortion_product_bound(double M, double s, double alpha);

struct GrowthCheck {
  double A = 0.0;  // min log M(Cr) / log M(r)
  double B = 0.0;  // max
  bool pass = false;
};

GrowthCheck bk_condition_check(const ExpSum& f, double C, double r_lo, double r_hi, int samples);

}  // namespace expweb
