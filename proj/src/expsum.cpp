#include "expweb/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace expweb {
namespace {

// Error-free transformation accumulator (Neumaier's variant of Kahan).
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

void check_exponent(const ExpSum& f, int k, const cplx& exponent) {
  if (!std::isfinite(exponent.real()) || !std::isfinite(exponent.imag())) {
    throw Error(ErrorCode::InvalidArgument, "non-finite argument");
  }
  if (exponent.real() + std::log(std::abs(f.coeff(k))) > kMaxExponent) {
    throw Error(ErrorCode::Overflow,
                "term " + std::to_string(k) + " exponent " + std::to_string(exponent.real()) +
                    " exceeds binary64 range");
  }
}

cplx sum_terms(const ExpSum& f, const cplx& z, int derivative_order) {
  CompensatedSum re;
  CompensatedSum im;
  const int n = f.order();
  for (int k = 0; k < n; ++k) {
    const cplx& w = f.omega(k);
    const cplx e = w * z;
    check_exponent(f, k, e);
    cplx term = f.coeff(k) * std::exp(e);
    for (int d = 0; d < derivative_order; ++d) term *= w;
    re.add(term.real());
    im.add(term.imag());
  }
  return {re.value(), im.value()};
}

}  // namespace

cplx root_of_unity(int k, int n) {
  if (n <= 0) throw Error(ErrorCode::InvalidArgument, "root of unity order must be positive");
  k = ((k % n) + n) % n;
  if ((4 * k) % n == 0) {
    switch ((4 * k) / n) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      case 3: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * k / n;
  return {std::cos(angle), std::sin(angle)};
}

ExpSum::ExpSum(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorCode::InvalidArgument, "an exponential sum needs n >= 1 terms");
  const int n = order();
  omega_.reserve(coeffs_.size());
  min_abs_ = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const cplx& a = coeffs_[static_cast<std::size_t>(k)];
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw Error(ErrorCode::InvalidArgument, "coefficient a_" + std::to_string(k) + " is not finite");
    }
    const double m = std::abs(a);
    if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "coefficient a_" + std::to_string(k) + " is zero");
    min_abs_ = std::min(min_abs_, m);
    max_abs_ = std::max(max_abs_, m);
    sum_abs_ += m;
    omega_.push_back(root_of_unity(k, n));
  }
}

bool ExpSum::equal_coefficients() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [&](const cplx& a) { return a == coeffs_.front(); });
}

int ExpSum::dominant_term(const cplx& z) const noexcept {
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < order(); ++k) {
    const double v = std::log(std::abs(coeffs_[static_cast<std::size_t>(k)])) +
                     (omega_[static_cast<std::size_t>(k)] * z).real();
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  return best;
}

std::string ExpSum::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "E" << order() << "[";
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k) os << ", ";
    os << "(" << coeffs_[k].real() << "," << coeffs_[k].imag() << ")";
  }
  os << "]";
  return os.str();
}

cplx evaluate(const ExpSum& f, const cplx& z) { return sum_terms(f, z, 0); }

cplx derivative(const ExpSum& f, const cplx& z, int order) {
  if (order != 1 && order != 2) throw Error(ErrorCode::InvalidArgument, "derivative order must be 1 or 2");
  return sum_terms(f, z, order);
}

PsiJet psi_jet(const ExpSum& f, int p, const cplx& z) {
  const int n = f.order();
  if (p < 0 || p >= n) throw Error(ErrorCode::InvalidArgument, "pivot index out of range");
  const cplx wp = f.omega(p);
  const cplx log_ap = std::log(f.coeff(p));
  PsiJet jet{};
  for (int k = 0; k < n; ++k) {
    if (k == p) continue;
    const cplx d = f.omega(k) - wp;
    const cplx e = std::log(f.coeff(k)) - log_ap + d * z;
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
      throw Error(ErrorCode::InvalidArgument, "non-finite argument");
    }
    if (e.real() > kMaxExponent) {
      throw Error(ErrorCode::Overflow, "ratio exponent of term " + std::to_string(k) + " exceeds binary64 range");
    }
    const cplx r = std::exp(e);
    jet.value += r;
    jet.d1 += d * r;
    jet.d2 += d * d * r;
  }
  return jet;
}

cplx psi(const ExpSum& f, int p, const cplx& z) { return psi_jet(f, p, z).value; }

FactoredJet factored_jet(const ExpSum& f, int p, const PsiJet& jet, const cplx& z) {
  const cplx wp = f.omega(p);
  FactoredJet out;
  out.pivot = p;
  out.log_pivot = std::log(f.coeff(p)) + wp * z;
  const cplx one_plus = 1.0 + jet.value;
  out.h0 = one_plus;
  out.h1 = wp * one_plus + jet.d1;
  out.h2 = wp * wp * one_plus + 2.0 * wp * jet.d1 + jet.d2;
  return out;
}

FactoredJet factored_jet(const ExpSum& f, int p, const cplx& z) {
  return factored_jet(f, p, psi_jet(f, p, z), z);
}

double FactoredJet::log_abs_f() const { return log_pivot.real() + std::log(std::abs(h0)); }
double FactoredJet::log_abs_fprime() const { return log_pivot.real() + std::log(std::abs(h1)); }
double FactoredJet::nonlinearity_ratio() const { return std::abs(h2) / std::abs(h1); }
double FactoredJet::log_derivative_ratio() const { return std::abs(h1) / std::abs(h0); }

double log_derivative_factor(const ExpSum& f, const cplx& z) {
  const cplx fz = evaluate(f, z);
  if (fz == cplx(0.0, 0.0)) throw Error(ErrorCode::ZeroValue, "f(z) = 0");
  return std::abs(z * derivative(f, z, 1) / fz);
}

double evaluable_radius(const ExpSum& f) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& a : f.coeffs()) worst = std::max(worst, std::log(std::abs(a)));
  return kMaxExponent - std::max(0.0, worst);
}

namespace {

double modulus_on_circle(const ExpSum& f, double r, double theta) {
  return std::abs(evaluate(f, std::polar(r, theta)));
}

// Golden-section search for a local maximum of |f(r e^{i theta})| on [a, b].
std::pair<double, double> golden_max(const ExpSum& f, double r, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = modulus_on_circle(f, r, c);
  double fd = modulus_on_circle(f, r, d);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = modulus_on_circle(f, r, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = modulus_on_circle(f, r, d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

double max_modulus(const ExpSum& f, double r, const MaxModulusOptions& opts) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "max_modulus needs r > 0");
  if (r > evaluable_radius(f)) {
    throw Error(ErrorCode::Overflow, "radius " + std::to_string(r) + " beyond evaluable range");
  }
  const int m = std::max(opts.angular_samples, 8);
  const double step = 2.0 * std::numbers::pi / m;
  std::vector<double> values(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) values[static_cast<std::size_t>(i)] = modulus_on_circle(f, r, i * step);

  // Refine around the largest sampled local maxima.
  std::vector<int> peaks;
  for (int i = 0; i < m; ++i) {
    const double prev = values[static_cast<std::size_t>((i + m - 1) % m)];
    const double next = values[static_cast<std::size_t>((i + 1) % m)];
    const double v = values[static_cast<std::size_t>(i)];
    if (v >= prev && v >= next) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
  });
  double best = *std::max_element(values.begin(), values.end());
  const int refine = std::min<int>(opts.refine_candidates, static_cast<int>(peaks.size()));
  for (int j = 0; j < refine; ++j) {
    const double centre = peaks[static_cast<std::size_t>(j)] * step;
    const auto [theta, val] = golden_max(f, r, centre - step, centre + step, opts.angular_tolerance);
    (void)theta;
    best = std::max(best, val);
  }
  return best;
}

double log_max_modulus(const ExpSum& f, double r, const MaxModulusOptions& opts) {
  return std::log(max_modulus(f, r, opts));
}

LogBounds max_modulus_log_bounds(const ExpSum& f, double r) {
  return {r + std::log(f.min_abs_coeff() / 2.0), r + std::log(f.sum_abs_coeff())};
}

namespace {

// Shared driver for iterated M(scale * r).  While the radius is evaluable the
// level is computed by max_modulus (both tracks equal); past that the
// log-bounds r + alpha1 <= log M(r) <= r + alpha2 advance the tracks.
std::vector<IteratedBound> iterate_scaled(const ExpSum& f, double scale, double R, int depth,
                                          ErrorCode not_expanding) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
  const double limit = evaluable_radius(f);
  if (scale * R > limit) throw Error(ErrorCode::Overflow, "starting radius beyond evaluable range");
  const double first = max_modulus(f, scale * R);
  if (!(first > R)) {
    throw Error(not_expanding, "M(" + std::to_string(scale * R) + ") = " + std::to_string(first) +
                                   " does not exceed R = " + std::to_string(R));
  }
  const double alpha1 = std::log(f.min_abs_coeff() / 2.0);
  const double alpha2 = std::log(f.sum_abs_coeff());

  std::vector<IteratedBound> out;
  TowerReal lo = TowerReal::from_double(first);
  TowerReal hi = lo;
  bool exact = true;
  out.push_back({1, lo, hi, true});
  for (int level = 2; level <= depth; ++level) {
    if (exact) {
      const auto r = lo.to_double();
      if (r && scale * *r <= limit) {
        lo = hi = TowerReal::from_double(max_modulus(f, scale * *r));
        out.push_back({level, lo, hi, true});
        continue;
      }
      exact = false;
    }
    lo = lo.scale(scale, Rounding::Down).add(alpha1, Rounding::Down).exp(Rounding::Down);
    hi = hi.scale(scale, Rounding::Up).add(alpha2, Rounding::Up).exp(Rounding::Up);
    out.push_back({level, lo, hi, false});
  }
  return out;
}

}  // namespace

std::vector<IteratedBound> iterate_max_modulus_tower(const ExpSum& f, double R, int depth) {
  return iterate_scaled(f, 1.0, R, depth, ErrorCode::NotExpanding);
}

std::vector<IteratedBound> iterate_mu_tower(const ExpSum& f, double eps, double R, int depth) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  return iterate_scaled(f, eps, R, depth, ErrorCode::MuNotExpanding);
}

}  // namespace expweb
