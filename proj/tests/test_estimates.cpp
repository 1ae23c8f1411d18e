#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "expweb/estimates.hpp"

using namespace expweb;

namespace {

const ExpSum g({0.5, 0.5, 0.5, 0.5});
const ExpSum e1({1.0});
const ExpSum e3({1.0, 1.0, 1.0});

// Partial product of the distortion bound, written independently.
double product_oracle(double M, double s, double alpha) {
  double p = 1.0;
  for (int m = 0; m < 200; ++m) p *= 1.0 + 8.0 * M * s * std::numbers::sqrt2 * std::pow(alpha, -m);
  return p;
}

const InequalityResult& result(const EstimateReport& r, Inequality q) {
  for (const auto& x : r.results) {
    if (x.id == q) return x;
  }
  throw std::logic_error("missing inequality");
}

}  // namespace

TEST_CASE("all inequalities hold at nu = 30") {
  for (const ExpSum* f : {&g, &e3}) {
    EstimateOptions o;
    o.samples = 10000;
    const EstimateReport r = verify_component_estimates(*f, 30.0, o);
    CHECK(r.all_pass());
    CHECK(r.results.size() == 5);
    CHECK(r.samples_per_sector == 10000);
    CHECK(r.tau == doctest::Approx(default_tau(*f, kDefaultEta)));
  }
  CHECK(default_tau(g, 51.0) == doctest::Approx(std::log(4 * 4 * 51.0) / (2 * std::sin(std::numbers::pi / 4))));
}

TEST_CASE("small nu with a narrow strip fails with a witness") {
  EstimateOptions o;
  o.samples = 2000;
  o.tau = 0.5;
  const EstimateReport r = verify_component_estimates(g, 1.0, o);
  const InequalityResult& q = result(r, Inequality::PsiSmall);
  CHECK_FALSE(q.pass);
  CHECK(q.worst_margin < 0.0);
  CHECK(std::abs(q.witness) > 0.0);
  // The witness reproduces the violation.
  const PsiJet j = psi_jet(g, q.witness_sector, q.witness);
  CHECK(std::max({std::abs(j.value), std::abs(j.d1), std::abs(j.d2)}) > 1.0 / 51.0);
}

TEST_CASE("reports are reproducible from the seed") {
  EstimateOptions o;
  o.samples = 3000;
  o.seed = 42;
  const EstimateReport a = verify_component_estimates(e3, 20.0, o), b = verify_component_estimates(e3, 20.0, o);
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    CHECK(a.results[i].worst_margin == b.results[i].worst_margin);
    CHECK(a.results[i].witness == b.results[i].witness);
  }
}

TEST_CASE("nu prime search") {
  NuPrimeOptions o;
  o.estimates.samples = 2000;
  const double nu = find_nu_prime(g, o);
  CHECK(nu <= 30.0);
  EstimateOptions e;
  e.samples = 10000;
  const EstimateReport r = verify_component_estimates(g, 2 * nu, e);
  CHECK(r.all_pass());
  CHECK(r.min_margin() >= 0.1);
  try {
    find_nu_prime(e1, o);
    FAIL("expected a precondition error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::PreconditionViolated);
  }
}

TEST_CASE("margins improve along a doubling ladder") {
  EstimateOptions o;
  o.samples = 4000;
  const EstimateReport r1 = verify_component_estimates(g, 10.0, o), r2 = verify_component_estimates(g, 20.0, o),
                       r3 = verify_component_estimates(g, 40.0, o);
  // psi and f''/f' near a strip edge are set by tau, not nu, so those two
  // margins saturate; a sampled extreme then moves by up to 1e-3 between rungs.
  for (std::size_t i = 0; i < r1.results.size(); ++i) {
    CHECK(r2.results[i].worst_margin >= r1.results[i].worst_margin - 1e-3);
    CHECK(r3.results[i].worst_margin >= r2.results[i].worst_margin - 1e-3);
  }
  for (Inequality q : {Inequality::UniformExpansion, Inequality::ThereIsLambda, Inequality::ThereIsEpsilon}) {
    CHECK(result(r2, q).worst_margin > result(r1, q).worst_margin);
    CHECK(result(r3, q).worst_margin > result(r2, q).worst_margin);
  }
}

TEST_CASE("nonlinearity") {
  const double s = 0.08;
  CHECK(nonlinearity(e1, {20.0, s}) == doctest::Approx(s * std::numbers::sqrt2).epsilon(1e-12));
  CHECK(nonlinearity(e1, {20.0, s}) == doctest::Approx(0.11314).epsilon(1e-4));
  CHECK(nonlinearity(e1, {3.0, 2 * s}) == doctest::Approx(2 * nonlinearity(e1, {3.0, s})).epsilon(1e-12));
  CHECK(nonlinearity(g, {cplx(20.0, 0.5), s}) == doctest::Approx(0.113).epsilon(0.005 / 0.113));
  try {
    // A 3x3 lattice puts a sample on the critical point z = 0.
    nonlinearity(g, {0.0, 0.1}, 3);
    FAIL("expected DerivativeZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DerivativeZero);
  }
}

TEST_CASE("conformality") {
  const ConformalityResult c = conformality_check(g, {cplx(20.0, 0.5), 0.08});
  CHECK(c.pass);
  CHECK(c.lhs == doctest::Approx(0.08).epsilon(0.05));
  CHECK(c.rhs == doctest::Approx(1.0 / (std::numbers::sqrt2 * 0.08 + 1.0)));
  CHECK_FALSE(conformality_criterion(1.0, 2.0));
  // Any s < 1/(8 sqrt 2) with sup < 2 passes.
  for (double s = 0.005; s < 1.0 / (8 * std::numbers::sqrt2); s += 0.005) {
    CHECK(conformality_criterion(s, 1.999));
  }
}

TEST_CASE("distortion") {
  const Square box{20.0, 0.08};
  const DistortionEstimate d = distortion_estimate(e1, 1, box, 4000, 1);
  CHECK(d.L >= 1.0);
  CHECK(d.L <= 1.0 + 8.0 * nonlinearity(e1, box));
  // |f'| ranges over [e^{x-s/2}, e^{x+s/2}], so the true distortion is e^s.
  CHECK(d.L <= std::exp(0.08) * (1 + 1e-9));
  CHECK(d.L >= std::exp(0.08) * 0.99);
  // A tiny box makes L close to 1.
  CHECK(distortion_estimate(e1, 1, {0.0, 1e-7}, 500, 1).L == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("distortion composes") {
  const Square box{cplx(4.0, 0.3), 0.01};
  const DistortionEstimate two = distortion_estimate(e3, 2, box, 4000, 3);
  const DistortionEstimate one = distortion_estimate(e3, 1, box, 4000, 3);
  // Square hull of f(box) from a 65x65 lattice.
  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (int i = 0; i <= 64; ++i) {
    for (int j = 0; j <= 64; ++j) {
      const cplx w = evaluate(e3, box.at(i / 64.0, j / 64.0));
      lo_re = std::min(lo_re, w.real());
      hi_re = std::max(hi_re, w.real());
      lo_im = std::min(lo_im, w.imag());
      hi_im = std::max(hi_im, w.imag());
    }
  }
  const Square hull{cplx((lo_re + hi_re) / 2, (lo_im + hi_im) / 2), std::max(hi_re - lo_re, hi_im - lo_im)};
  const DistortionEstimate outer = distortion_estimate(e3, 1, hull, 20000, 3);
  CHECK(two.L <= outer.L * one.L * (1 + 1e-6));
}

TEST_CASE("distortion bounded by nonlinearity on boxes") {
  for (double x : {12.0, 18.0, 25.0}) {
    for (const ExpSum* f : {&g, &e3}) {
      const Square box{cplx(x, 0.37), 0.08};
      const double N = nonlinearity(*f, box);
      REQUIRE(N < 0.25);
      CHECK(distortion_estimate(*f, 1, box, 2000, 5).L <= 1 + 8 * N + 1e-6);
    }
  }
}

TEST_CASE("distortion product") {
  const double lambda = distortion_product_bound(2.0, 0.08, 2.0);
  CHECK(lambda == doctest::Approx(product_oracle(2.0, 0.08, 2.0)).epsilon(1e-10));
  CHECK(lambda == doctest::Approx(11.8).epsilon(0.01));
  CHECK(2.0 * 0.08 * std::numbers::sqrt2 < 0.25);
  CHECK(distortion_product_bound(2.0, 1e-9, 2.0) == doctest::Approx(1.0).epsilon(1e-6));
  double prev = 1.0;
  for (double s = 0.01; s < 0.085; s += 0.01) {
    const double v = distortion_product_bound(2.0, s, 2.0);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(distortion_product_bound(2.0, 0.1, 2.0), Error);
  CHECK_THROWS_AS(distortion_product_bound(2.0, 0.05, 1.0), Error);
}

TEST_CASE("growth condition") {
  const GrowthCheck ge = bk_condition_check(e1, 2.0, 1.0, 300.0, 32);
  CHECK(ge.A == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ge.B == doctest::Approx(2.0).epsilon(1e-12));
  const GrowthCheck gg = bk_condition_check(g, 2.0, 30.0, 300.0, 64);
  CHECK(gg.pass);
  // log M(r) = r - log 2 + o(1), so the ratio is 2 + log 2 / (r - log 2).
  const double ratio_hi = 2 + std::log(2.0) / (30.0 - std::log(2.0));
  const double ratio_lo = 2 + std::log(2.0) / (300.0 - std::log(2.0));
  CHECK(gg.A == doctest::Approx(ratio_lo).epsilon(1e-9));
  CHECK(gg.B == doctest::Approx(ratio_hi).epsilon(1e-9));
  CHECK(gg.A > 1.9);
  CHECK(gg.B < 2.1);
}
