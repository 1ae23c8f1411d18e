// AVX2 + FMA variant of the psi kernel.  Compiled with -mavx2 -mfma and only
// called after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "expweb/kernels.hpp"

namespace expweb::simd::detail {
namespace {

// Reduction constants for exp (fdlibm split of ln 2).
constexpr double kLog2e = 1.4426950408889634;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;

// pi/2 split for Cody-Waite reduction with fused multiply-add.
constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPio2Hi = 1.5707963267948966;
constexpr double kPio2Lo = 6.123233995736766e-17;
// Beyond this |argument| the two-term reduction loses accuracy; such blocks
// go through the scalar kernel.
constexpr double kMaxTrigArg = 4.0e5;

constexpr double kUnderflow = -708.0;

inline __m256d exp_pd(__m256d x) {
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Hi), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Lo), r);

  // Taylor polynomial to degree 13 on |r| <= ln2/2.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^n assembled in the exponent field; valid for n in [-1022, 1023].
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
  const __m256i bits =
      _mm256_slli_epi64(_mm256_castpd_si256(_mm256_add_pd(_mm256_add_pd(n, _mm256_set1_pd(1023.0)), magic)), 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  const __m256d tiny = _mm256_cmp_pd(x, _mm256_set1_pd(kUnderflow), _CMP_LT_OQ);
  return _mm256_andnot_pd(tiny, result);
}

inline void sincos_pd(__m256d y, __m256d& s_out, __m256d& c_out) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Hi), y);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Lo), r);
  const __m256d r2 = _mm256_mul_pd(r, r);

  // fdlibm __kernel_sin / __kernel_cos coefficients.
  __m256d ps = _mm256_set1_pd(1.58969099521155010221e-10);
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-2.50507602534068634195e-08));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(2.75573137070700676789e-06));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.98412698298579493134e-04));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(8.33333333332248946124e-03));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.66666666666666324348e-01));
  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(ps, r2), r, r);

  __m256d pc = _mm256_set1_pd(-1.13596475577881948265e-11);
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(2.08757232129817482790e-09));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-2.75573143513906633035e-07));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(2.48015872894767294178e-05));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.38888888888741095749e-03));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(4.16666666666666019037e-02));
  const __m256d r4 = _mm256_mul_pd(r2, r2);
  const __m256d c = _mm256_fmadd_pd(pc, r4, _mm256_fnmadd_pd(_mm256_set1_pd(0.5), r2, _mm256_set1_pd(1.0)));

  // Quadrant from the low bits of q (1.5 * 2^52 keeps negatives in two's complement).
  const __m256i qi = _mm256_castpd_si256(_mm256_add_pd(q, _mm256_set1_pd(6755399441055744.0)));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, one), one));
  const __m256d sin_neg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, two), two));
  const __m256i q1 = _mm256_add_epi64(qi, one);
  const __m256d cos_neg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q1, two), two));

  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d sb = _mm256_blendv_pd(s, c, swap);
  const __m256d cb = _mm256_blendv_pd(c, s, swap);
  s_out = _mm256_xor_pd(sb, _mm256_and_pd(sin_neg, sign));
  c_out = _mm256_xor_pd(cb, _mm256_and_pd(cos_neg, sign));
}

}  // namespace

std::size_t psi_batch_avx2(const PsiPlan& plan, const double* zr, const double* zi, std::size_t n,
                           PsiBatch& out) {
  const std::size_t terms = plan.terms();
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(zr + i);
    const __m256d y = _mm256_loadu_pd(zi + i);
    __m256d vr = _mm256_setzero_pd(), vi = _mm256_setzero_pd();
    __m256d d1r = _mm256_setzero_pd(), d1i = _mm256_setzero_pd();
    __m256d d2r = _mm256_setzero_pd(), d2i = _mm256_setzero_pd();
    bool fallback = false;
    for (std::size_t k = 0; k < terms; ++k) {
      const __m256d cr = _mm256_set1_pd(plan.c_re[k]);
      const __m256d ci = _mm256_set1_pd(plan.c_im[k]);
      const __m256d dr = _mm256_set1_pd(plan.d_re[k]);
      const __m256d di = _mm256_set1_pd(plan.d_im[k]);
      const __m256d er = _mm256_fnmadd_pd(di, y, _mm256_fmadd_pd(dr, x, cr));
      const __m256d ei = _mm256_fmadd_pd(di, x, _mm256_fmadd_pd(dr, y, ci));
      // NaN-safe: anything not <= the limit takes the scalar path.
      const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(er, _mm256_set1_pd(kMaxExponent), _CMP_LE_OQ),
                                       _mm256_cmp_pd(_mm256_and_pd(ei, abs_mask), _mm256_set1_pd(kMaxTrigArg),
                                                     _CMP_LE_OQ));
      if (_mm256_movemask_pd(ok) != 0xF) {
        fallback = true;
        break;
      }
      const __m256d m = exp_pd(er);
      __m256d s, c;
      sincos_pd(ei, s, c);
      const __m256d rr = _mm256_mul_pd(m, c);
      const __m256d ri = _mm256_mul_pd(m, s);
      vr = _mm256_add_pd(vr, rr);
      vi = _mm256_add_pd(vi, ri);
      d1r = _mm256_add_pd(d1r, _mm256_fnmadd_pd(di, ri, _mm256_mul_pd(dr, rr)));
      d1i = _mm256_add_pd(d1i, _mm256_fmadd_pd(di, rr, _mm256_mul_pd(dr, ri)));
      const __m256d qr = _mm256_set1_pd(plan.dd_re[k]);
      const __m256d qi = _mm256_set1_pd(plan.dd_im[k]);
      d2r = _mm256_add_pd(d2r, _mm256_fnmadd_pd(qi, ri, _mm256_mul_pd(qr, rr)));
      d2i = _mm256_add_pd(d2i, _mm256_fmadd_pd(qi, rr, _mm256_mul_pd(qr, ri)));
    }
    if (fallback) {
      const std::size_t stop = psi_batch_scalar(plan, zr, zi, i, i + 4, out);
      if (stop != i + 4) return stop;
      continue;
    }
    _mm256_storeu_pd(out.v_re.data() + i, vr);
    _mm256_storeu_pd(out.v_im.data() + i, vi);
    _mm256_storeu_pd(out.d1_re.data() + i, d1r);
    _mm256_storeu_pd(out.d1_im.data() + i, d1i);
    _mm256_storeu_pd(out.d2_re.data() + i, d2r);
    _mm256_storeu_pd(out.d2_im.data() + i, d2i);
  }
  return psi_batch_scalar(plan, zr, zi, i, n, out);
}

}  // namespace expweb::simd::detail
