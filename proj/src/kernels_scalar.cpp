#include <cmath>

#include "expweb/kernels.hpp"

namespace expweb::simd {

PsiPlan make_psi_plan(const ExpSum& f, int pivot) {
  if (pivot < 0 || pivot >= f.order()) throw Error(ErrorCode::InvalidArgument, "pivot index out of range");
  PsiPlan plan;
  plan.pivot = pivot;
  const cplx log_ap = std::log(f.coeff(pivot));
  for (int k = 0; k < f.order(); ++k) {
    if (k == pivot) continue;
    const cplx c = std::log(f.coeff(k)) - log_ap;
    const cplx d = f.omega(k) - f.omega(pivot);
    const cplx dd = d * d;
    plan.c_re.push_back(c.real());
    plan.c_im.push_back(c.imag());
    plan.d_re.push_back(d.real());
    plan.d_im.push_back(d.imag());
    plan.dd_re.push_back(dd.real());
    plan.dd_im.push_back(dd.imag());
  }
  return plan;
}

void PsiBatch::resize(std::size_t n) {
  for (auto* v : {&v_re, &v_im, &d1_re, &d1_im, &d2_re, &d2_im}) v->resize(n);
}

namespace detail {

// Reference kernel.  The AVX2 kernel performs the same operations in the
// same order, four points at a time.
std::size_t psi_batch_scalar(const PsiPlan& plan, const double* zr, const double* zi, std::size_t begin,
                             std::size_t end, PsiBatch& out) {
  const std::size_t terms = plan.terms();
  for (std::size_t i = begin; i < end; ++i) {
    const double x = zr[i];
    const double y = zi[i];
    double vr = 0, vi = 0, d1r = 0, d1i = 0, d2r = 0, d2i = 0;
    for (std::size_t k = 0; k < terms; ++k) {
      const double er = plan.c_re[k] + plan.d_re[k] * x - plan.d_im[k] * y;
      const double ei = plan.c_im[k] + plan.d_re[k] * y + plan.d_im[k] * x;
      if (!(er <= kMaxExponent)) return i;
      const double m = er < -708.0 ? 0.0 : std::exp(er);
      const double rr = m * std::cos(ei);
      const double ri = m * std::sin(ei);
      vr += rr;
      vi += ri;
      d1r += plan.d_re[k] * rr - plan.d_im[k] * ri;
      d1i += plan.d_re[k] * ri + plan.d_im[k] * rr;
      d2r += plan.dd_re[k] * rr - plan.dd_im[k] * ri;
      d2i += plan.dd_re[k] * ri + plan.dd_im[k] * rr;
    }
    out.v_re[i] = vr;
    out.v_im[i] = vi;
    out.d1_re[i] = d1r;
    out.d1_im[i] = d1i;
    out.d2_re[i] = d2r;
    out.d2_im[i] = d2i;
  }
  return end;
}

}  // namespace detail
}  // namespace expweb::simd
