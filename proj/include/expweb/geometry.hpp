#pragma once

#include <string>
#include <vector>

#include "expweb/expsum.hpp"

namespace expweb {

enum class RegionKind { InPolygon, InStrip, InComponent, OnBoundary };

const char* to_string(RegionKind kind) noexcept;

struct Location {
  RegionKind kind = RegionKind::OnBoundary;
  int index = -1;  // strip or component index; -1 otherwise

  bool operator==(const Location&) const = default;
  std::string to_string() const;
};

// Oriented line through `point` with unit `direction`.  The unit normal is
// the direction rotated clockwise, so for a counter-clockwise polygon side it
// points outward.
struct Line {
  cplx point;
  cplx direction;

  cplx normal() const noexcept { return direction * cplx(0.0, -1.0); }
  double signed_distance(const cplx& z) const noexcept;
  cplx at(double t) const noexcept { return point + t * direction; }
};

// Intersection of two non-parallel lines; throws InvalidArgument if parallel.
cplx intersect(const Line& a, const Line& b);

/// Regular n-gon P(nu) with apothem nu, half-strips of half-width tau centred
/// on its vertex directions, and the n unbounded components of the rest.
class RegionDecomposition {
 public:
  RegionDecomposition(ExpSum f, double nu, double tau);

  const ExpSum& function() const noexcept { return f_; }
  int order() const noexcept { return f_.order(); }
  double nu() const noexcept { return nu_; }
  double tau() const noexcept { return tau_; }
  double circumradius() const noexcept;
  const std::vector<cplx>& vertices() const noexcept { return vertices_; }

  // Strip k is centred on the ray at angle (1 - 2k) pi / n, i.e. on vertex
  // (-k mod n).
  static int strip_vertex(int k, int n) noexcept;
  cplx strip_axis(int k) const;

  bool in_polygon(const cplx& z) const noexcept;
  // Index of the first strip containing z (ignoring the polygon), or -1.
  int strip_index(const cplx& z) const noexcept;

  Location locate(const cplx& z) const;
  double boundary_distance(const cplx& z) const;
  // Line containing the polygon side that faces component p.
  Line gamma_line(int p) const;

  // Strips meet outside the polygon only when tau >= nu sin(pi/n).
  bool strips_separated() const noexcept;

 private:
  ExpSum f_;
  double nu_;
  double tau_;
  std::vector<cplx> vertices_;
};

enum class PolygonTag { P, PPrime };

struct ClosedPolyline {
  std::vector<cplx> vertices;
  PolygonTag tag = PolygonTag::P;
  // For P': the chosen cut index m for each vertex.
  std::vector<long long> cut_index;

  double signed_area() const noexcept;
  double perimeter() const noexcept;
  bool is_simple() const;
  bool positively_oriented() const noexcept { return signed_area() > 0.0; }
  // Winding-number containment; boundary points count as outside.
  bool contains(const cplx& z) const noexcept;
  double distance_to_boundary(const cplx& z) const noexcept;
  double min_modulus() const noexcept;
  double max_modulus() const noexcept;
};

ClosedPolyline polygon_boundary(const RegionDecomposition& dec);

// Line cutting the corner at vertex j between the sides facing components
// p = -j and p' = -j-1 (mod n):  Im((w^p' - w^p) z + log(a_p'/a_p)) = 2 m pi.
// Its normal points toward the vertex.
Line cut_line(const ExpSum& f, int j, long long m);

// Distance from the origin to cut_line(f, j, m) measured along the vertex ray.
double cut_offset(const ExpSum& f, int j, long long m);

/// The 2n-gon P'(nu): every vertex of P(nu) is replaced by a chord on the
/// least admissible cut line.  Throws NuTooSmall if some vertex has none.
ClosedPolyline truncated_polygon(const ExpSum& f, double nu, double tau);

/// count + 1 arc-length-uniform points, starting at vertex 0 and repeating it.
std::vector<cplx> sample_boundary(const ClosedPolyline& poly, int count);

}  // namespace expweb
