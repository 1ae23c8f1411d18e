#include "expweb/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace expweb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

double cross(const cplx& a, const cplx& b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(const cplx& a, const cplx& b) { return a.real() * b.real() + a.imag() * b.imag(); }

int wrap(int k, int n) { return ((k % n) + n) % n; }

// Distance from z to the piece {o + t d : t in [t0, t1]} with |d| = 1.
double piece_distance(const cplx& z, const cplx& o, const cplx& d, double t0, double t1) {
  const double t = std::clamp(dot(z - o, d), t0, t1);
  return std::abs(z - (o + t * d));
}

double segment_distance(const cplx& z, const cplx& a, const cplx& b) {
  const double len = std::abs(b - a);
  if (len == 0.0) return std::abs(z - a);
  return piece_distance(z, a, (b - a) / len, 0.0, len);
}

// Orientation-based segment intersection, touching included.
bool segments_meet(const cplx& p1, const cplx& p2, const cplx& q1, const cplx& q2) {
  auto orient = [](const cplx& a, const cplx& b, const cplx& c) {
    const double v = cross(b - a, c - a);
    const double scale = std::abs(b - a) * std::abs(c - a);
    if (std::abs(v) <= 1e-14 * scale) return 0;
    return v > 0 ? 1 : -1;
  };
  auto on_segment = [](const cplx& a, const cplx& b, const cplx& c) {
    return std::min(a.real(), b.real()) <= c.real() && c.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= c.imag() && c.imag() <= std::max(a.imag(), b.imag());
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

const char* to_string(RegionKind kind) noexcept {
  switch (kind) {
    case RegionKind::InPolygon: return "InPolygon";
    case RegionKind::InStrip: return "InStrip";
    case RegionKind::InComponent: return "InComponent";
    case RegionKind::OnBoundary: return "OnBoundary";
  }
  return "?";
}

std::string Location::to_string() const {
  std::string s = expweb::to_string(kind);
  if (index >= 0) s += "(" + std::to_string(index) + ")";
  return s;
}

double Line::signed_distance(const cplx& z) const noexcept { return dot(z - point, normal()); }

cplx intersect(const Line& a, const Line& b) {
  const double den = cross(a.direction, b.direction);
  if (std::abs(den) < 1e-15) throw Error(ErrorCode::InvalidArgument, "parallel lines do not intersect");
  const double t = cross(b.point - a.point, b.direction) / den;
  return a.at(t);
}

RegionDecomposition::RegionDecomposition(ExpSum f, double nu, double tau) : f_(std::move(f)), nu_(nu), tau_(tau) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  const int n = order();
  if (n < 3) throw Error(ErrorCode::PreconditionViolated, "the polygon decomposition needs n >= 3");
  vertices_.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) vertices_.push_back(circumradius() * root_of_unity(2 * k + 1, 2 * n));
}

double RegionDecomposition::circumradius() const noexcept { return nu_ / std::cos(kPi / order()); }

int RegionDecomposition::strip_vertex(int k, int n) noexcept { return wrap(-k, n); }

cplx RegionDecomposition::strip_axis(int k) const { return root_of_unity(1 - 2 * k, 2 * order()); }

bool RegionDecomposition::in_polygon(const cplx& z) const noexcept {
  const int n = order();
  for (int p = 0; p < n; ++p) {
    if ((z * f_.omega(p)).real() >= nu_) return false;
  }
  return true;
}

int RegionDecomposition::strip_index(const cplx& z) const noexcept {
  const int n = order();
  for (int k = 0; k < n; ++k) {
    const cplx w = z * std::conj(strip_axis(k));
    if (w.real() > 0.0 && std::abs(w.imag()) < tau_) return k;
  }
  return -1;
}

bool RegionDecomposition::strips_separated() const noexcept { return tau_ < nu_ * std::sin(kPi / order()); }

Location RegionDecomposition::locate(const cplx& z) const {
  if (boundary_distance(z) <= 1e-12 * std::max(1.0, std::abs(z))) return {RegionKind::OnBoundary, -1};
  if (in_polygon(z)) return {RegionKind::InPolygon, -1};
  if (const int k = strip_index(z); k >= 0) return {RegionKind::InStrip, k};
  const int n = order();
  const long long p = std::llround(-std::arg(z) * n / (2.0 * kPi));
  return {RegionKind::InComponent, wrap(static_cast<int>(p % n), n)};
}

double RegionDecomposition::boundary_distance(const cplx& z) const {
  const int n = order();
  double best = kInf;
  for (int k = 0; k < n; ++k) {
    best = std::min(best, segment_distance(z, vertices_[static_cast<std::size_t>(k)],
                                           vertices_[static_cast<std::size_t>((k + 1) % n)]));
  }
  // Strip edges, keeping only the parts outside the polygon.
  auto clipped = [&](const cplx& o, const cplx& d, double t0, double t1) {
    double lo = -kInf, hi = kInf;
    for (int p = 0; p < n; ++p) {
      const double a = (d * f_.omega(p)).real();
      const double b = (o * f_.omega(p)).real();
      if (a > 0) {
        hi = std::min(hi, (nu_ - b) / a);
      } else if (a < 0) {
        lo = std::max(lo, (nu_ - b) / a);
      } else if (b >= nu_) {
        hi = -kInf;
      }
    }
    if (lo >= hi) {
      best = std::min(best, piece_distance(z, o, d, t0, t1));
      return;
    }
    if (lo > t0) best = std::min(best, piece_distance(z, o, d, t0, std::min(lo, t1)));
    if (hi < t1) best = std::min(best, piece_distance(z, o, d, std::max(hi, t0), t1));
  };
  for (int k = 0; k < n; ++k) {
    const cplx axis = strip_axis(k);
    const cplx side = axis * cplx(0.0, 1.0);
    clipped(tau_ * side, axis, 0.0, kInf);
    clipped(-tau_ * side, axis, 0.0, kInf);
    clipped(-tau_ * side, side, 0.0, 2.0 * tau_);
  }
  return best;
}

Line RegionDecomposition::gamma_line(int p) const {
  const int n = order();
  const cplx outward = std::conj(f_.omega(wrap(p, n)));
  return {nu_ * outward, outward * cplx(0.0, 1.0)};
}

double ClosedPolyline::signed_area() const noexcept {
  double a = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(vertices[i], vertices[(i + 1) % n]);
  return 0.5 * a;
}

double ClosedPolyline::perimeter() const noexcept {
  double s = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) s += std::abs(vertices[(i + 1) % n] - vertices[i]);
  return s;
}

bool ClosedPolyline::is_simple() const {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (vertices[i] == vertices[(i + 1) % n]) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_meet(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool ClosedPolyline::contains(const cplx& z) const noexcept {
  int winding = 0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx& a = vertices[i];
    const cplx& b = vertices[(i + 1) % n];
    const double side = cross(b - a, z - a);
    if (a.imag() <= z.imag()) {
      if (b.imag() > z.imag() && side > 0) ++winding;
    } else if (b.imag() <= z.imag() && side < 0) {
      --winding;
    }
  }
  return winding != 0;
}

double ClosedPolyline::distance_to_boundary(const cplx& z) const noexcept {
  double best = kInf;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, segment_distance(z, vertices[i], vertices[(i + 1) % n]));
  return best;
}

double ClosedPolyline::min_modulus() const noexcept { return distance_to_boundary(cplx(0.0, 0.0)); }

double ClosedPolyline::max_modulus() const noexcept {
  double best = 0.0;
  for (const cplx& v : vertices) best = std::max(best, std::abs(v));
  return best;
}

ClosedPolyline polygon_boundary(const RegionDecomposition& dec) {
  return {dec.vertices(), PolygonTag::P, {}};
}

namespace {

struct CutPair {
  int p;
  int p_next;
  cplx d;     // w^p' - w^p
  double c;   // Im log(a_p' / a_p), principal branch
};

CutPair cut_pair(const ExpSum& f, int j) {
  const int n = f.order();
  if (n < 3) throw Error(ErrorCode::PreconditionViolated, "cut lines need n >= 3");
  CutPair cp;
  cp.p = wrap(-j, n);
  cp.p_next = wrap(-j - 1, n);
  cp.d = f.omega(cp.p_next) - f.omega(cp.p);
  cp.c = std::arg(f.coeff(cp.p_next) / f.coeff(cp.p));
  return cp;
}

}  // namespace

double cut_offset(const ExpSum& f, int j, long long m) {
  const CutPair cp = cut_pair(f, j);
  return (cp.c - 2.0 * kPi * static_cast<double>(m)) / std::abs(cp.d);
}

Line cut_line(const ExpSum& f, int j, long long m) {
  const int n = f.order();
  const cplx towards_vertex = root_of_unity(2 * wrap(j, n) + 1, 2 * n);
  return {cut_offset(f, j, m) * towards_vertex, towards_vertex * cplx(0.0, 1.0)};
}

ClosedPolyline truncated_polygon(const ExpSum& f, double nu, double tau) {
  const RegionDecomposition dec(f, nu, tau);
  const int n = f.order();
  const double rho = dec.circumradius();
  // The chord must leave the strip on both sides: its offset along the
  // vertex ray is at most rho - tau tan(pi/n).
  const double limit = rho - tau * std::tan(kPi / n);

  ClosedPolyline out;
  out.tag = PolygonTag::PPrime;
  for (int j = 0; j < n; ++j) {
    const CutPair cp = cut_pair(f, j);
    const double spacing = 2.0 * kPi / std::abs(cp.d);
    long long m = static_cast<long long>(std::ceil((cp.c / std::abs(cp.d) - limit) / spacing));
    while (cut_offset(f, j, m) > limit) ++m;
    while (cut_offset(f, j, m - 1) <= limit) --m;
    const double h = cut_offset(f, j, m);
    if (h < nu) {
      throw Error(ErrorCode::NuTooSmall, "no admissible cut for vertex " + std::to_string(j) + " at nu=" +
                                             std::to_string(nu) + " (needs nu(1/cos(pi/n) - 1) - tau tan(pi/n) "
                                             "to contain a cut offset)");
    }
    const Line cut = cut_line(f, j, m);
    out.vertices.push_back(intersect(cut, dec.gamma_line(cp.p)));
    out.vertices.push_back(intersect(cut, dec.gamma_line(cp.p_next)));
    out.cut_index.push_back(m);
  }
  return out;
}

std::vector<cplx> sample_boundary(const ClosedPolyline& poly, int count) {
  const std::size_t nv = poly.vertices.size();
  if (nv < 3) throw Error(ErrorCode::InvalidArgument, "polyline needs at least three vertices");
  if (count < static_cast<int>(nv)) {
    throw Error(ErrorCode::InvalidArgument, "sample count must be at least the vertex count");
  }
  const double total = poly.perimeter();
  const double step = total / count;
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(count) + 1);
  std::size_t edge = 0;
  double edge_start = 0.0;
  double edge_len = std::abs(poly.vertices[1 % nv] - poly.vertices[0]);
  for (int i = 0; i < count; ++i) {
    const double s = i * step;
    while (s > edge_start + edge_len && edge + 1 < nv) {
      edge_start += edge_len;
      ++edge;
      edge_len = std::abs(poly.vertices[(edge + 1) % nv] - poly.vertices[edge]);
    }
    const cplx a = poly.vertices[edge];
    const cplx b = poly.vertices[(edge + 1) % nv];
    const double t = edge_len > 0.0 ? std::clamp((s - edge_start) / edge_len, 0.0, 1.0) : 0.0;
    out.push_back(a + t * (b - a));
  }
  out.push_back(out.front());
  return out;
}

}  // namespace expweb
