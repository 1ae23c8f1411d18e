#include "expweb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "expweb/parallel.hpp"

namespace expweb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Orbit modulus at level n as a pair of towers.
std::pair<TowerReal, TowerReal> orbit_tower(const OrbitRecord& orbit, int n) {
  if (n <= orbit.overflow_depth) {
    const TowerReal t = TowerReal::from_double(std::abs(orbit.points[static_cast<std::size_t>(n)]));
    return {t, t};
  }
  const LogModulusBounds b = orbit_log_modulus(orbit, n);
  return {TowerReal::from_double(b.lower).exp(Rounding::Down), TowerReal::from_double(b.upper).exp(Rounding::Up)};
}

// Is |orbit level n| >= bound?  While both sides are ordinary floats the
// comparison is on point values, so equality counts as holding.
TriState dominates(const OrbitRecord& orbit, int n, const IteratedBound& bound) {
  if (n <= orbit.overflow_depth && bound.exact) {
    const double m = *bound.lower.to_double();
    return std::abs(orbit.points[static_cast<std::size_t>(n)]) >= m ? TriState::True : TriState::False;
  }
  const auto [lo, hi] = orbit_tower(orbit, n);
  return certified_geq(lo, hi, bound.lower, bound.upper);
}

}  // namespace

Comparison compare_orbit(const OrbitRecord& orbit, const std::vector<IteratedBound>& tower, int depth, int shift) {
  Comparison c;
  const int last = std::min({depth, orbit.depth_reached - shift, static_cast<int>(tower.size())});
  for (int n = 1; n <= last; ++n) {
    const TriState t = dominates(orbit, n + shift, tower[static_cast<std::size_t>(n - 1)]);
    c.checked = n;
    if (t == TriState::False) return {TriState::False, n, n};
    if (t == TriState::Undetermined && c.verdict == TriState::True) {
      c.verdict = TriState::Undetermined;
      c.witness = n;
    }
  }
  if (c.checked == 0) c.verdict = TriState::Undetermined;
  return c;
}

OrbitRecord iterate_orbit(const ExpSum& f, const cplx& z0, int max_depth, const OrbitOptions& opts) {
  if (max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 1");
  OrbitRecord rec;
  rec.z0 = z0;
  rec.points.push_back(z0);
  for (int k = 0; k < max_depth; ++k) {
    const cplx z = rec.points.back();
    const int p = f.dominant_term(z);
    const FactoredJet fj = factored_jet(f, p, z);
    const double h0 = std::abs(fj.h0);
    const double factor = h0 == 0.0 ? kInf : std::abs(z) * std::abs(fj.h1) / h0;
    if (h0 == 0.0) rec.hit_zero = true;
    try {
      rec.points.push_back(evaluate(f, z));
      rec.factors.push_back(factor);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Overflow) throw;
      if (std::abs(psi(f, p, z)) < 1.0 / opts.eta) {
        rec.log_point = fj.log_pivot + std::log(fj.h0);
        rec.log_sector = p;
        rec.factors.push_back(factor);
      }
      break;
    }
  }
  rec.overflow_depth = static_cast<int>(rec.points.size()) - 1;
  rec.depth_reached = rec.overflow_depth + (rec.log_point ? 1 : 0);
  return rec;
}

LogModulusBounds orbit_log_modulus(const OrbitRecord& orbit, int n) {
  if (n < 0 || n > orbit.depth_reached) throw Error(ErrorCode::InvalidArgument, "orbit level out of range");
  if (n <= orbit.overflow_depth) {
    const double v = std::log(std::abs(orbit.points[static_cast<std::size_t>(n)]));
    return {v, v};
  }
  // Rounding in w^p z_k scales with |z_k|; a few ulps of slack cover it.
  const double re = orbit.log_point->real();
  const double slack = 1e-14 * (1.0 + std::abs(orbit.points.back()) + std::abs(re));
  return {re - slack, re + slack};
}

const char* to_string(Label label) noexcept {
  switch (label) {
    case Label::Escaping: return "Escaping";
    case Label::InAR: return "InAR";
    case Label::InA: return "InA";
    case Label::JuliaOrMCFC: return "JuliaOrMCFC";
    case Label::Julia: return "Julia";
    case Label::NotInAR: return "NotInAR";
    case Label::Undetermined: return "Undetermined";
  }
  return "?";
}

Classification classify_AR(const ExpSum& f, const cplx& z0, double R, int depth) {
  return classify_AR(f, z0, iterate_max_modulus_tower(f, R, depth), depth);
}

Classification classify_AR(const ExpSum& f, const cplx& z0, const std::vector<IteratedBound>& tower, int depth) {
  const OrbitRecord orbit = iterate_orbit(f, z0, depth);
  const Comparison c = compare_orbit(orbit, tower, depth, 0);
  Classification out;
  out.depth = c.checked;
  out.witness_level = c.witness;
  switch (c.verdict) {
    case TriState::True:
      out.label = Label::InAR;
      out.ell = 0;
      out.detail = "orbit dominates M^n(R) for n <= " + std::to_string(c.checked);
      break;
    case TriState::False:
      out.label = Label::NotInAR;
      out.detail = "orbit falls below M^n(R) at n = " + std::to_string(c.witness);
      break;
    case TriState::Undetermined:
      out.label = Label::Undetermined;
      out.detail = c.checked == 0 ? "no level computable" : "tracks overlap at n = " + std::to_string(c.witness);
      break;
  }
  return out;
}

Classification classify_A(const ExpSum& f, const cplx& z0, double eps, double R, int depth, int ell_max) {
  if (ell_max < 0) throw Error(ErrorCode::InvalidArgument, "ell_max must be nonnegative");
  // mu_eps(r) > r on a few radii at and above R.
  for (double r = R; r <= 4.0 * R && eps * r <= evaluable_radius(f); r *= 1.25) {
    if (!(max_modulus(f, eps * r) > r)) {
      throw Error(ErrorCode::MuNotExpanding, "mu_eps(r) <= r at r = " + std::to_string(r));
    }
  }
  const auto tower = iterate_mu_tower(f, eps, R, depth);
  const OrbitRecord orbit = iterate_orbit(f, z0, depth + ell_max);
  Classification out;
  out.label = Label::Undetermined;
  out.detail = "no shift up to " + std::to_string(ell_max) + " verified";
  for (int ell = 0; ell <= ell_max; ++ell) {
    const Comparison c = compare_orbit(orbit, tower, depth, ell);
    if (c.verdict == TriState::True) {
      out.label = Label::InA;
      out.ell = ell;
      out.depth = c.checked;
      out.witness_level = -1;
      out.detail = "shifted orbit dominates mu^n(R) for n <= " + std::to_string(c.checked);
      return out;
    }
    if (out.witness_level < 0) out.witness_level = c.witness;
  }
  return out;
}

bool escapes(const OrbitRecord& orbit, const EscapeOptions& opts) {
  if (orbit.log_point) return true;
  const std::size_t n = orbit.points.size();
  const std::size_t steps = static_cast<std::size_t>(std::max(opts.monotone_steps, 1));
  if (n < steps + 1 || !(std::abs(orbit.points.back()) > opts.escape_radius)) return false;
  for (std::size_t i = n - steps; i < n; ++i) {
    if (!(std::abs(orbit.points[i]) > std::abs(orbit.points[i - 1]))) return false;
  }
  return true;
}

Classification julia_criterion(const ExpSum& f, const cplx& z0, double lambda, int depth,
                               const EscapeOptions& escape) {
  if (!(lambda > 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must exceed 1");
  const OrbitRecord orbit = iterate_orbit(f, z0, depth);
  if (orbit.hit_zero) throw Error(ErrorCode::ZeroValue, "f vanishes on the orbit");
  Classification out;
  out.label = Label::Undetermined;
  out.depth = orbit.depth_reached;
  if (!escapes(orbit, escape)) {
    out.detail = "orbit not seen to escape";
    return out;
  }
  // A zero factor makes the derivative product vanish; no finite tail can
  // recover the expansion estimate.
  const auto& fs = orbit.factors;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (fs[j] == 0.0) {
      out.witness_level = static_cast<int>(j);
      out.detail = "critical point on the orbit";
      return out;
    }
  }
  std::size_t start = fs.size();
  while (start > 0 && fs[start - 1] >= lambda) --start;
  if (start == fs.size()) {
    out.witness_level = static_cast<int>(fs.size()) - 1;
    out.detail = "last factor below lambda";
    return out;
  }
  out.label = Label::Julia;
  out.no_mcfc = true;
  out.witness_level = static_cast<int>(start);
  out.detail = "partial certificate: factors >= lambda from index " + std::to_string(start);
  return out;
}

cplx LabelGrid::pixel_center(int col, int row) const noexcept {
  const double x = window.re_min + (col + 0.5) * (window.re_max - window.re_min) / width;
  const double y = window.im_max - (row + 0.5) * (window.im_max - window.im_min) / height;
  return {x, y};
}

LabelGrid classify_grid(const ExpSum& f, const Window& window, int width, int height, const GridParams& params) {
  if (width < 2 || height < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 2x2");
  if (!(window.re_max > window.re_min) || !(window.im_max > window.im_min)) {
    throw Error(ErrorCode::InvalidArgument, "window must have positive extent");
  }
  const auto tower = iterate_max_modulus_tower(f, params.R, params.depth);
  LabelGrid grid;
  grid.width = width;
  grid.height = height;
  grid.window = window;
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  grid.labels.assign(count, Label::Undetermined);
  parallel_chunks(count, 4096, params.workers, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const cplx z = grid.pixel_center(static_cast<int>(i % width), static_cast<int>(i / width));
      grid.labels[i] = classify_AR(f, z, tower, params.depth).label;
    }
  });
  for (Label l : grid.labels) ++grid.histogram[static_cast<std::size_t>(l)];
  return grid;
}

std::array<unsigned char, 3> label_color(Label label) noexcept {
  switch (label) {
    case Label::Escaping: return {200, 60, 60};
    case Label::InAR: return {255, 200, 40};
    case Label::InA: return {230, 120, 30};
    case Label::JuliaOrMCFC: return {180, 180, 255};
    case Label::Julia: return {255, 255, 255};
    case Label::NotInAR: return {20, 30, 70};
    case Label::Undetermined: return {110, 110, 110};
  }
  return {0, 0, 0};
}

std::string encode_ppm(const LabelGrid& grid) {
  std::string out = "P6\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
  out.reserve(out.size() + grid.labels.size() * 3);
  for (Label l : grid.labels) {
    const auto c = label_color(l);
    out.append(reinterpret_cast<const char*>(c.data()), 3);
  }
  return out;
}

void write_ppm(const std::string& path, const LabelGrid& grid) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot open " + path + " for writing");
  const std::string bytes = encode_ppm(grid);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorCode::InvalidArgument, "failed writing " + path);
}

}  // namespace expweb
