#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expweb/estimates.hpp"
#include "expweb/expsum.hpp"
#include "expweb/geometry.hpp"
#include "expweb/mcmullen.hpp"
#include "expweb/tower.hpp"

namespace expweb {

// Throws PreconditionViolated for n < 3: those functions lie in class B, where
// A_R(f) is never a spider's web.
void require_web_order(const ExpSum& f);

// kappa = 2 pi cot(pi/n) + 2 tau sin(pi/n)
double web_kappa(int n, double tau);

struct EpsilonPrime {
  double value = 0.0;           // 0.9 * min |f| / e^nu over the sampled boundary
  double floor = 0.0;           // 0.9 * min|a| e^{-kappa} / 2
  double log_min_side = 0.0;    // min log|f| - nu on the polygon-side pieces
  double log_min_chord = 0.0;   // same on the cut chords
  std::vector<double> chord_log_min;  // per chord j
  bool side_bound = false;      // |f| >= |a_p| e^nu / 2 on side p
  bool chord_bound = false;     // |f| >= |a_p| e^{-kappa} e^nu / 2 on chords
  cplx witness;                 // where the minimum was sampled
  std::size_t samples = 0;
};

inline constexpr double kEpsilonMargin = 0.1;

/// Samples the boundary of P'(nu) (equal counts per edge) in log space.
/// Throws NuTooSmall if P'(nu) cannot be built.
EpsilonPrime epsilon_prime(const ExpSum& f, double nu, double tau, int boundary_samples);

struct WebOptions {
  double eta = kDefaultEta;
  std::optional<double> nu_floor;  // skip the threshold search
  int boundary_samples = 4096;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t search_samples = 2000;
};

struct WebParams {
  double nu = 0.0;
  double R = 0.0;
  double delta = 0.0;
  double epsilon_prime = 0.0;
  double tau = 0.0;
  double eta = kDefaultEta;
  double nu_floor = 0.0;
  int fixed_point_rounds = 0;
  std::vector<ParamCheck> checks;

  bool gates_pass() const noexcept;
  // beta(r) = (eps'/2) e^r in tower form.
  TowerReal beta(const TowerReal& r, Rounding rounding) const;
};

// Sampled delta M(r) >= M(delta r)/delta >= r on r >= R, continued past the
// sampled range with the analytic log M bounds.
ParamCheck delta_chain(const ExpSum& f, double delta, double R);

/// Measures eps' on P'(nu), sets delta = eps'/(2 sum|a|), finds R by
/// doubling and takes nu = max(floor, R/delta); repeats until eps' measured
/// at the final nu is no smaller than the one used.
WebParams make_web_params(const ExpSum& f, const WebOptions& opts = {});

// G_n = P'(beta^n(nu)): an explicit polygon while its parameter fits in a
// double, otherwise only the parameter.
struct WebDomain {
  int n = 0;
  TowerReal nu_lo;
  TowerReal nu_hi;
  std::optional<ClosedPolyline> polygon;

  bool explicit_form() const noexcept { return polygon.has_value(); }
};

std::vector<WebDomain> build_web_sequence(const ExpSum& f, const WebParams& params, int count);

struct InclusionResult {
  int n = 0;
  TriState verdict = TriState::Undetermined;
  TowerReal beta_lo;  // lower track of beta^n(nu)
  TowerReal m_hi;     // upper track of M^n(R)
};

/// beta^n(nu) >= M^n(R) for n = 0..n_max.
std::vector<InclusionResult> verify_inclusion(const ExpSum& f, const WebParams& params, int n_max);

struct WindingResult {
  long long winding = 0;
  std::size_t segments = 0;  // pieces evaluated at the finest refinement
  double residual = 0.0;     // distance of the accumulated turn count from an integer
};

/// Winding number of f(boundary) around 0, from exact per-piece argument
/// increments on pieces where one term provably dominates.  Doubling the base
/// count must reproduce the same integer twice, else WindingUnstable.
WindingResult image_winding(const ExpSum& f, const ClosedPolyline& boundary, int base_pieces);

// Winding number of a closed sampled curve around a point by accumulated
// principal argument steps; throws WindingUnstable if a step is too large.
long long curve_winding(const std::vector<cplx>& curve, const cplx& centre);

struct WebStepReport {
  int n = 0;
  std::string mode;               // "explicit" or "symbolic"
  TowerReal min_mod_boundary;     // lower bound for min |f| on the boundary of G_n
  TowerReal sup_next_radius;      // upper bound for |z| on G_{n+1}
  std::optional<long long> winding;  // explicit mode only
  bool winding_nonzero = false;
  bool pass_a = false;
  bool pass_b = false;
  std::size_t samples = 0;
  std::string note;
};

/// Condition that G_{n+1} lies in a bounded component of C \ f(boundary G_n):
/// the modulus gap plus nonzero winding.  Symbolic domains reuse the measured
/// eps' and the scaling of P'(nu) and say so in the note.
WebStepReport verify_step(const ExpSum& f, const WebParams& params, const WebDomain& g_n, const WebDomain& g_next,
                          int boundary_samples);

// Lower bound for the winding of f(boundary P'(nu)), valid for every
// parameter at least nu; it grows linearly in nu.
double winding_lower_bound(const ExpSum& f, double nu, double tau);

struct WebCertificate {
  WebParams params;
  std::vector<InclusionResult> inclusion;
  std::vector<WebStepReport> steps;
  int depth_requested = 0;
  int depth_certified = -1;
  bool certified = false;
};

/// Inclusion for n <= max(depth, 6) and steps n < depth.
WebCertificate certify_web(const ExpSum& f, const WebParams& params, int depth, int boundary_samples);

}  // namespace expweb
