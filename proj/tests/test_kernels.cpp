#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "expweb/kernels.hpp"

using namespace expweb;
using namespace expweb::simd;

namespace {

// Sum of the moduli of the ratio terms: the scale of any rounding error.
double term_scale(const PsiPlan& plan, double zr, double zi, int order) {
  double s = 0.0;
  for (std::size_t k = 0; k < plan.terms(); ++k) {
    const double m = std::exp(plan.c_re[k] + plan.d_re[k] * zr - plan.d_im[k] * zi);
    const double d = std::hypot(plan.d_re[k], plan.d_im[k]);
    s += m * std::pow(d, order);
  }
  return s;
}

void compare_isas(const ExpSum& f, double spread, std::uint64_t seed) {
  if (!isa_supported(Isa::Avx2)) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-spread, spread);
  for (int p = 0; p < f.order(); ++p) {
    const PsiPlan plan = make_psi_plan(f, p);
    // Odd count exercises the scalar tail of the vector loop.
    std::vector<double> zr(1003), zi(1003);
    for (std::size_t i = 0; i < zr.size(); ++i) {
      zr[i] = u(rng);
      zi[i] = u(rng);
    }
    PsiBatch a, b;
    REQUIRE(psi_batch(Isa::Scalar, plan, zr, zi, a) == zr.size());
    REQUIRE(psi_batch(Isa::Avx2, plan, zr, zi, b) == zr.size());
    for (std::size_t i = 0; i < zr.size(); ++i) {
      const PsiJet x = a.jet(i), y = b.jet(i);
      CHECK(std::abs(x.value - y.value) <= 1e-13 * term_scale(plan, zr[i], zi[i], 0) + 1e-300);
      CHECK(std::abs(x.d1 - y.d1) <= 1e-13 * term_scale(plan, zr[i], zi[i], 1) + 1e-300);
      CHECK(std::abs(x.d2 - y.d2) <= 1e-13 * term_scale(plan, zr[i], zi[i], 2) + 1e-300);
    }
  }
}

}  // namespace

TEST_CASE("scalar kernel matches psi_jet") {
  const ExpSum f({{0.5, 0.1}, {1.0, -0.3}, {0.7, 0.0}, {2.0, 0.4}, {0.3, 0.3}});
  const PsiPlan plan = make_psi_plan(f, 1);
  std::vector<double> zr = {0.0, 3.0, -4.0, 10.0}, zi = {0.0, 2.0, 1.0, -7.0};
  PsiBatch out;
  REQUIRE(psi_batch(Isa::Scalar, plan, zr, zi, out) == zr.size());
  for (std::size_t i = 0; i < zr.size(); ++i) {
    const PsiJet ref = psi_jet(f, 1, {zr[i], zi[i]});
    const PsiJet got = out.jet(i);
    const double s = 1e-13 * term_scale(plan, zr[i], zi[i], 2) + 1e-13 * term_scale(plan, zr[i], zi[i], 0);
    CHECK(std::abs(ref.value - got.value) <= s);
    CHECK(std::abs(ref.d1 - got.d1) <= s + 1e-13 * term_scale(plan, zr[i], zi[i], 1));
    CHECK(std::abs(ref.d2 - got.d2) <= s);
  }
}

TEST_CASE("AVX2 kernel agrees with the scalar reference") {
  compare_isas(ExpSum({0.5, 0.5, 0.5, 0.5}), 40.0, 1);
  compare_isas(ExpSum({1.0, 1.0, 1.0, 1.0, 1.0}), 60.0, 2);
  compare_isas(ExpSum({{1.0, 2.0}, {0.1, -0.5}, {3.0, 0.0}}), 30.0, 3);
  compare_isas(ExpSum(std::vector<cplx>(9, cplx(0.25, 0.1))), 50.0, 4);
}

TEST_CASE("overflow index is reported identically") {
  const ExpSum f({1.0, 1.0, 1.0});
  const PsiPlan plan = make_psi_plan(f, 0);
  std::vector<double> zr = {1.0, 2.0, -600.0, 3.0, 4.0}, zi = {0.0, 0.0, 0.0, 0.0, 0.0};
  PsiBatch a;
  CHECK(psi_batch(Isa::Scalar, plan, zr, zi, a) == 2);
  if (isa_supported(Isa::Avx2)) {
    PsiBatch b;
    CHECK(psi_batch(Isa::Avx2, plan, zr, zi, b) == 2);
  }
}

TEST_CASE("dispatch names") {
  CHECK(std::string(to_string(Isa::Scalar)) == "scalar");
  CHECK(isa_supported(Isa::Scalar));
  CHECK(isa_supported(active_isa()));
}
