#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expweb/dynamics.hpp"
#include "expweb/estimates.hpp"
#include "expweb/expsum.hpp"

namespace expweb {

struct ParamCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured quantity
  double threshold = 0.0;  // what it was compared against
};

struct ParamOverrides {
  std::optional<double> sigma;
  std::optional<double> eta;
  std::optional<double> tau;
  std::optional<double> eps0;
  std::optional<double> nu0;
  std::optional<double> nu_prime;  // skip the threshold search
  double large_multiple = 100.0;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t search_samples = 2000;
};

/// Constants of the box construction.  Only make_params (which enforces
/// every constraint) and the explicitly test-only factory can build one.
class RefinementParams {
 public:
  double sigma() const noexcept { return sigma_; }
  double eta() const noexcept { return eta_; }
  double tau() const noexcept { return tau_; }
  double eps0() const noexcept { return eps0_; }
  double nu0() const noexcept { return nu0_; }
  double nu_prime() const noexcept { return nu_prime_; }
  double large_multiple() const noexcept { return large_multiple_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool checked() const noexcept { return checked_; }
  const std::vector<ParamCheck>& checks() const noexcept { return checks_; }

  // alpha(r) = exp(eps0 r) / 2
  double alpha(double r) const noexcept;
  // nu_0, alpha(nu_0), alpha^2(nu_0), ...; +inf once out of range.
  std::vector<double> schedule(int count) const;

  static RefinementParams unchecked_for_testing(double sigma, double eta, double tau, double eps0, double nu0,
                                                std::uint64_t seed = 1);

 private:
  friend RefinementParams make_params(const ExpSum& f, const ParamOverrides& overrides);
  RefinementParams() = default;

  double sigma_ = 0.0, eta_ = 0.0, tau_ = 0.0, eps0_ = 0.0, nu0_ = 0.0, nu_prime_ = 0.0;
  double large_multiple_ = 100.0;
  std::uint64_t seed_ = 1;
  bool checked_ = false;
  std::vector<ParamCheck> checks_;
};

/// Fills defaults, finds nu' and a nu_0 meeting every start condition.
/// Throws ParamSearchFailed naming the violated condition.
RefinementParams make_params(const ExpSum& f, const ParamOverrides& overrides = {});

struct BoxId {
  long long m = 0;
  long long m_prime = 0;

  static BoxId containing(const cplx& z, double sigma);
  cplx lower_left(double sigma) const noexcept;
  cplx center(double sigma) const noexcept;
  bool contains(const cplx& z, double sigma) const noexcept;
  bool operator==(const BoxId&) const = default;
};

struct BoxFrame {
  int sector = 0;
  double inner_side = 0.0;            // guaranteed curvilinear square side of f(B)
  double modulus_lo = 0.0, modulus_hi = 0.0;  // bounds on |f| over B
  double arg_lo = 0.0, arg_hi = 0.0;          // bounds on arg f over B (unwrapped)
  double relative_band = 0.0;                 // 2/eta
};

/// Inner square side and modulus/argument bands of f over a box in R(nu).
/// Throws BoxNotInSector if the box leaves a single sector.
BoxFrame box_image_frame(const ExpSum& f, const BoxId& box, double sigma, double nu, double eta, double tau);

/// Seed box K_0 in R_0(nu_0) whose image avoids every strip direction.
BoxId seed_box(const ExpSum& f, const RefinementParams& params);

struct SurvivalReport {
  int level = 1;
  std::size_t samples = 0;
  std::size_t survivors = 0;
  double fraction = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  std::size_t lost_strip = 0;    // image in or within sigma*sqrt(2) of a strip
  std::size_t lost_polygon = 0;  // image in or within sigma*sqrt(2) of the polygon
  std::size_t lost_frame = 0;    // image box cut by the image of the seed-box edge
  BoxId seed;
  std::uint64_t seed_value = 0;
  std::vector<cplx> survivor_sample;  // first survivors in sample order
};

struct SurvivalOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t keep_survivors = 0;
  std::string dump_csv;  // optional path for the kept survivors
};

// 95% Wilson score interval.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials);

/// Monte Carlo survival of the seed box under one (level 1) or two (level 2,
/// conditional on level 1) refinement steps.
SurvivalReport survival_fraction(const ExpSum& f, const RefinementParams& params, int level,
                                 const SurvivalOptions& opts);

struct AreaBound {
  double product = 1.0;  // prod over the first `levels` factors
  double tail = 0.0;     // bound on the remaining sum of losses
  double delta = 1.0;    // product * (1 - tail)
  std::vector<double> schedule;
};

AreaBound area_lower_bound(const RefinementParams& params, double loss_constant, int levels);

/// Finite-depth Julia and A(0) certificate for a point of the seed box.
Classification certify_point(const ExpSum& f, const RefinementParams& params, const cplx& z, int depth);

}  // namespace expweb
