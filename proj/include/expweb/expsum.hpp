#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "expweb/error.hpp"
#include "expweb/tower.hpp"

namespace expweb {

using cplx = std::complex<double>;

// Largest real exponent whose exp() is finite in binary64.
inline constexpr double kMaxExponent = 709.0;

/// An exponential sum f(z) = sum_k a_k exp(w^k z) with w = exp(2 pi i / n)
/// and every coefficient nonzero.
class ExpSum {
 public:
  explicit ExpSum(std::vector<cplx> coeffs);

  int order() const noexcept { return static_cast<int>(coeffs_.size()); }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  const std::vector<cplx>& omega_powers() const noexcept { return omega_; }
  const cplx& coeff(int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
  const cplx& omega(int k) const { return omega_.at(static_cast<std::size_t>(k)); }

  double min_abs_coeff() const noexcept { return min_abs_; }
  double max_abs_coeff() const noexcept { return max_abs_; }
  double sum_abs_coeff() const noexcept { return sum_abs_; }
  bool equal_coefficients() const noexcept;

  // Index of the term with the largest modulus at z (ties -> lowest index).
  int dominant_term(const cplx& z) const noexcept;

  std::string describe() const;

 private:
  std::vector<cplx> coeffs_;
  std::vector<cplx> omega_;
  double min_abs_ = 0.0;
  double max_abs_ = 0.0;
  double sum_abs_ = 0.0;
};

/// exp(2 pi i k / n), exact for multiples of a quarter turn.
cplx root_of_unity(int k, int n);

cplx evaluate(const ExpSum& f, const cplx& z);
cplx derivative(const ExpSum& f, const cplx& z, int order);

// Value and first two derivatives of psi_p(z) = f(z) / (a_p exp(w^p z)) - 1,
// summed term by term relative to the pivot.
struct PsiJet {
  cplx value;
  cplx d1;
  cplx d2;
};

PsiJet psi_jet(const ExpSum& f, int p, const cplx& z);
cplx psi(const ExpSum& f, int p, const cplx& z);

// f, f', f'' expressed relative to a pivot term D = a_p exp(w^p z):
// f = D*h0, f' = D*h1, f'' = D*h2.  log_pivot = log a_p + w^p z.
struct FactoredJet {
  int pivot = 0;
  cplx log_pivot;
  cplx h0;
  cplx h1;
  cplx h2;

  double log_abs_f() const;
  double log_abs_fprime() const;
  // |f''/f'|
  double nonlinearity_ratio() const;
  // |f'/f|
  double log_derivative_ratio() const;
};

FactoredJet factored_jet(const ExpSum& f, int p, const cplx& z);
FactoredJet factored_jet(const ExpSum& f, int p, const PsiJet& jet, const cplx& z);

/// |z f'(z) / f(z)|; throws ZeroValue when f(z) vanishes.
double log_derivative_factor(const ExpSum& f, const cplx& z);

struct MaxModulusOptions {
  int angular_samples = 4096;
  double angular_tolerance = 1e-12;
  int refine_candidates = 8;
};

double max_modulus(const ExpSum& f, double r, const MaxModulusOptions& opts = {});
double log_max_modulus(const ExpSum& f, double r, const MaxModulusOptions& opts = {});

struct LogBounds {
  double lower;
  double upper;
};

LogBounds max_modulus_log_bounds(const ExpSum& f, double r);

// Largest radius at which every term of f is finite in binary64.
double evaluable_radius(const ExpSum& f);

/// Conservative tracks for the n-th iterated maximum modulus M^n(R, f).
struct IteratedBound {
  int level = 0;
  TowerReal lower;
  TowerReal upper;
  bool exact = false;
};

std::vector<IteratedBound> iterate_max_modulus_tower(const ExpSum& f, double R, int depth);

// Same construction for mu_eps(r) = M(eps r, f).
std::vector<IteratedBound> iterate_mu_tower(const ExpSum& f, double eps, double R, int depth);

}  // namespace expweb
