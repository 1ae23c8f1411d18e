#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "expweb/expsum.hpp"

namespace expweb::simd {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;

/// Best supported instruction set.  Setting EXPWEB_SIMD=scalar in the
/// environment pins the scalar reference path.
Isa active_isa() noexcept;

// Pivot-relative terms of psi_p: for every k != p the ratio
// (a_k / a_p) exp((w^k - w^p) z) = exp(c_k + d_k z).
struct PsiPlan {
  int pivot = 0;
  std::vector<double> c_re, c_im;    // log(a_k / a_p)
  std::vector<double> d_re, d_im;    // w^k - w^p
  std::vector<double> dd_re, dd_im;  // (w^k - w^p)^2

  std::size_t terms() const noexcept { return c_re.size(); }
};

PsiPlan make_psi_plan(const ExpSum& f, int pivot);

// Structure-of-arrays output: psi, psi', psi'' at each point.
struct PsiBatch {
  std::vector<double> v_re, v_im, d1_re, d1_im, d2_re, d2_im;

  void resize(std::size_t n);
  std::size_t size() const noexcept { return v_re.size(); }
  PsiJet jet(std::size_t i) const { return {{v_re[i], v_im[i]}, {d1_re[i], d1_im[i]}, {d2_re[i], d2_im[i]}}; }
};

/// Evaluates psi jets at points (zr[i], zi[i]).  Returns the index of the
/// first point whose ratio exponent overflows binary64, or zr.size() when
/// every point succeeded; entries at and after a failing index are
/// unspecified.
std::size_t psi_batch(Isa isa, const PsiPlan& plan, std::span<const double> zr, std::span<const double> zi,
                      PsiBatch& out);

inline std::size_t psi_batch(const PsiPlan& plan, std::span<const double> zr, std::span<const double> zi,
                             PsiBatch& out) {
  return psi_batch(active_isa(), plan, zr, zi, out);
}

namespace detail {
std::size_t psi_batch_scalar(const PsiPlan& plan, const double* zr, const double* zi, std::size_t begin,
                             std::size_t end, PsiBatch& out);
#if defined(EXPWEB_HAVE_AVX2_TU)
std::size_t psi_batch_avx2(const PsiPlan& plan, const double* zr, const double* zi, std::size_t n,
                           PsiBatch& out);
#endif
}  // namespace detail

}  // namespace expweb::simd
