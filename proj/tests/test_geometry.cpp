#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "expweb/estimates.hpp"
#include "expweb/geometry.hpp"

using namespace expweb;
using std::numbers::pi;

namespace {

const ExpSum g({0.5, 0.5, 0.5, 0.5});
const ExpSum e3({1.0, 1.0, 1.0});
const ExpSum e5({1.0, 1.0, 1.0, 1.0, 1.0});

// Direct strip predicate: z rotated onto the strip axis lies in the right half
// of the band |Im| < tau.
bool in_strip_oracle(const cplx& z, int k, int n, double tau) {
  const cplx r = z * std::polar(1.0, -(1.0 - 2.0 * k) * pi / n);
  return r.real() > 0.0 && std::abs(r.imag()) < tau;
}

}  // namespace

TEST_CASE("locate examples") {
  const RegionDecomposition dec(e3, 10.0, 5.0);
  CHECK(dec.locate(15.0) == Location{RegionKind::InComponent, 0});
  CHECK(dec.locate(0.0).kind == RegionKind::InPolygon);
  CHECK(dec.boundary_distance(15.0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(dec.boundary_distance(cplx(10.0, 0.0)) < 1e-12);

  const RegionDecomposition d5(e5, 10.0, 3.0);
  for (int k = 0; k < 5; ++k) {
    const cplx v = (10.0 / std::cos(pi / 5)) * std::polar(1.0, (2 * k + 1) * pi / 5);
    CHECK(std::abs(d5.vertices()[k] - v) < 1e-12);
    CHECK(d5.locate(v * 1.0001).kind == RegionKind::InStrip);
  }
}

TEST_CASE("partition agrees with the direct predicates") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (const ExpSum* f : {&e3, &g, &e5}) {
    const int n = f->order();
    const RegionDecomposition dec(*f, 12.0, 4.0);
    for (int i = 0; i < 4000; ++i) {
      const cplx z(u(rng), u(rng));
      const Location loc = dec.locate(z);
      if (loc.kind == RegionKind::OnBoundary) continue;
      const bool in_poly = dec.in_polygon(z);
      CHECK((loc.kind == RegionKind::InPolygon) == in_poly);
      int strips = 0;
      for (int k = 0; k < n; ++k) strips += in_strip_oracle(z, k, n, 4.0);
      if (!in_poly) {
        CHECK((loc.kind == RegionKind::InStrip) == (strips > 0));
        if (loc.kind == RegionKind::InStrip) CHECK(in_strip_oracle(z, loc.index, n, 4.0));
      }
      if (loc.kind == RegionKind::InComponent) {
        // The term for component p dominates outside the polygon and strips.
        CHECK(f->dominant_term(z) == loc.index);
      }
    }
  }
}

TEST_CASE("rotation equivariance") {
  // Rotating clockwise by 2 pi / n advances component and strip labels by one.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (const ExpSum* f : {&e3, &g, &e5}) {
    const int n = f->order();
    const RegionDecomposition dec(*f, 10.0, 4.0);
    const cplx rot = std::conj(root_of_unity(1, n));
    for (int i = 0; i < 2000; ++i) {
      const cplx z(u(rng), u(rng));
      const Location a = dec.locate(z), b = dec.locate(z * rot);
      if (a.kind == RegionKind::OnBoundary || b.kind == RegionKind::OnBoundary) continue;
      CHECK(a.kind == b.kind);
      if (a.index >= 0 && a.kind == b.kind) CHECK(b.index == (a.index + 1) % n);
    }
  }
}

TEST_CASE("boundary distance is 1-Lipschitz") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-40.0, 40.0), step(-0.5, 0.5);
  const RegionDecomposition dec(g, 10.0, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const cplx z(u(rng), u(rng));
    const cplx w = z + cplx(step(rng), step(rng));
    CHECK(std::abs(dec.boundary_distance(z) - dec.boundary_distance(w)) <= std::abs(z - w) + 1e-12);
  }
}

TEST_CASE("gamma lines") {
  const RegionDecomposition dec(g, 7.0, 3.0);
  const Line l0 = dec.gamma_line(0);
  for (const cplx z : {cplx(3.0, 2.0), cplx(9.0, -4.0), cplx(-1.0, 0.0)}) {
    CHECK(l0.signed_distance(z) == doctest::Approx(z.real() - 7.0).epsilon(1e-12));
  }
  for (const ExpSum* f : {&e3, &g, &e5}) {
    const int n = f->order();
    const RegionDecomposition d(*f, 7.0, 3.0);
    for (int p = 0; p < n; ++p) {
      const cplx a = d.gamma_line(p).direction, b = d.gamma_line((p + 1) % n).direction;
      const double angle = std::abs(std::arg(b / a));
      // Directions of adjacent sides differ by the exterior angle 2 pi / n.
      CHECK(angle == doctest::Approx(2 * pi / n).epsilon(1e-12));
      CHECK(pi - angle == doctest::Approx(pi - 2 * pi / n).epsilon(1e-12));
    }
  }
}

TEST_CASE("cut lines") {
  for (const ExpSum* f : {&e3, &g, &e5}) {
    const int n = f->order();
    const double s = std::sin(pi / n);
    for (long long m : {-3LL, 0LL, 2LL}) {
      const Line l = cut_line(*f, 0, m);
      // Explicit slope form: Im z = -cot(pi/n) Re z + (Im c0 - 2 m pi) / (2 sin^2(pi/n)), c0 = 0.
      for (double t : {-5.0, 0.0, 7.0}) {
        const cplx z = l.at(t);
        const double expected = -z.real() / std::tan(pi / n) + (0.0 - 2.0 * m * pi) / (2 * s * s);
        CHECK(z.imag() == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
      }
      // Perpendicular to the boundary of strip 0.
      const cplx axis = std::polar(1.0, pi / n);
      CHECK(std::abs((l.direction / axis).real()) < 1e-9);
    }
    // |g_j| >= |a_j e^{w^j z}| on the line.
    for (int j = 0; j < n; ++j) {
      const int p = ((-j) % n + n) % n, q = ((-j - 1) % n + n) % n;
      const Line l = cut_line(*f, j, -4);
      for (int i = 0; i < 100; ++i) {
        const cplx z = l.at(-10.0 + 0.2 * i);
        const cplx dom = f->coeff(p) * std::exp(f->omega(p) * z);
        const cplx pair = dom + f->coeff(q) * std::exp(f->omega(q) * z);
        CHECK(std::abs(pair) >= std::abs(dom) * (1 - 1e-12));
      }
    }
  }
}

TEST_CASE("truncated polygon for g at nu = 20") {
  const double tau = default_tau(g, kDefaultEta);
  const ClosedPolyline pp = truncated_polygon(g, 20.0, tau);
  CHECK(pp.tag == PolygonTag::PPrime);
  CHECK(pp.vertices.size() == 8);
  CHECK(pp.is_simple());
  CHECK(pp.positively_oriented());
  CHECK(pp.min_modulus() >= 20.0 - 1e-9);
  CHECK(pp.max_modulus() <= 40.0 + 1e-9);
  for (const cplx& z : sample_boundary(pp, 4000)) {
    CHECK(std::abs(z) >= 20.0 - 1e-9);
    CHECK(std::abs(z) <= 40.0 + 1e-9);
  }
  const double chord = std::abs(pp.vertices[1] - pp.vertices[0]);
  CHECK(chord >= 2 * tau * std::tan(pi / 4) * std::cos(pi / 4));
  for (long long m : pp.cut_index) CHECK(m == pp.cut_index[0]);
  CHECK(pp.cut_index[0] == -5);
}

TEST_CASE("truncated polygon needs room") {
  try {
    truncated_polygon(e3, 1.0, default_tau(e3, kDefaultEta));
    FAIL("expected NuTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NuTooSmall);
  }
}

TEST_CASE("boundary sampling") {
  ClosedPolyline sq;
  sq.vertices = {cplx(0, 0), cplx(1, 0), cplx(1, 1), cplx(0, 1)};
  const auto s4 = sample_boundary(sq, 4);
  REQUIRE(s4.size() == 5);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(s4[i] - sq.vertices[i]) < 1e-12);
  CHECK(std::abs(s4[4] - s4[0]) < 1e-12);
  const auto s8 = sample_boundary(sq, 8);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(s8[i + 1] - s8[i]) == doctest::Approx(0.5).epsilon(1e-12));

  const ClosedPolyline pp = truncated_polygon(e5, 30.0, default_tau(e5, kDefaultEta));
  const int count = 1000;
  const auto s = sample_boundary(pp, count);
  const double gap = pp.perimeter() / count;
  for (int i = 0; i < count; ++i) {
    CHECK(pp.distance_to_boundary(s[i]) < 1e-12 * 30.0);
    // Straight-line gaps equal the arc step except across a corner.
    CHECK(std::abs(s[i + 1] - s[i]) <= gap + 1e-12 * 30.0);
  }
}
