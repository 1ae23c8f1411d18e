#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expweb/expsum.hpp"
#include "expweb/tower.hpp"

namespace expweb {

/// Orbit of z0 while it stays in binary64, plus at most one step continued
/// in logarithmic coordinates after the first overflow.
struct OrbitRecord {
  cplx z0;
  std::vector<cplx> points;  // z_0, z_1, ..., z_k (all finite)
  // log z_{k+1} = log a_p + w^p z_k + log(1 + psi_p(z_k)) when continued.
  std::optional<cplx> log_point;
  int log_sector = -1;
  // |z_j f'(z_j) / f(z_j)| for every z_j that was mapped forward; +inf if
  // f(z_j) = 0.
  std::vector<double> factors;
  int overflow_depth = 0;  // iterates computed in float range
  int depth_reached = 0;   // overflow_depth plus the log step, if any
  bool hit_zero = false;
};

struct OrbitOptions {
  double eta = 51.0;  // dominance needed to continue past overflow
};

OrbitRecord iterate_orbit(const ExpSum& f, const cplx& z0, int max_depth, const OrbitOptions& opts = {});

// Conservative bounds on log|z_n| for n <= depth_reached.
struct LogModulusBounds {
  double lower;
  double upper;
};
LogModulusBounds orbit_log_modulus(const OrbitRecord& orbit, int n);

struct Comparison {
  TriState verdict = TriState::True;
  int checked = 0;   // levels compared
  int witness = -1;  // first False / Undetermined level
};

/// Compares |z_{n+shift}| with tower[n-1] for n = 1..depth while the orbit
/// and the tower both reach that far.
Comparison compare_orbit(const OrbitRecord& orbit, const std::vector<IteratedBound>& tower, int depth, int shift);

enum class Label { Escaping, InAR, InA, JuliaOrMCFC, Julia, NotInAR, Undetermined };

const char* to_string(Label label) noexcept;
inline constexpr int kLabelCount = 7;

struct Classification {
  Label label = Label::Undetermined;
  int depth = 0;           // levels actually compared
  int ell = -1;            // shift for InA
  int witness_level = -1;  // first failing or undecidable level
  bool no_mcfc = false;    // Julia upgrade used the no-multiply-connected-component fact
  std::string detail;
};

/// Does |f^n(z0)| >= M^n(R) hold for n = 1..depth (as far as computable)?
Classification classify_AR(const ExpSum& f, const cplx& z0, double R, int depth);
// Same, against precomputed M^n(R) tracks (levels 1..).
Classification classify_AR(const ExpSum& f, const cplx& z0, const std::vector<IteratedBound>& tower, int depth);

/// Least shift ell <= ell_max with |f^{n+ell}(z0)| >= mu_eps^n(R).
Classification classify_A(const ExpSum& f, const cplx& z0, double eps, double R, int depth, int ell_max);

struct EscapeOptions {
  double escape_radius = 1e3;
  int monotone_steps = 3;
};

// Heuristic: the orbit overflowed, or passed the escape radius while growing
// for the last few steps.
bool escapes(const OrbitRecord& orbit, const EscapeOptions& opts = {});

/// Finite-depth check of the expansion hypothesis |z_n f'(z_n)/f(z_n)| >= lambda
/// along an escaping orbit.  Throws ZeroValue if some f(z_n) = 0.
Classification julia_criterion(const ExpSum& f, const cplx& z0, double lambda, int depth,
                               const EscapeOptions& escape = {});

struct Window {
  double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;

  bool operator==(const Window&) const = default;
};

struct GridParams {
  double R = 1.0;
  int depth = 4;
  unsigned workers = 1;
};

struct LabelGrid {
  int width = 0;
  int height = 0;
  Window window;
  std::vector<Label> labels;  // row-major, row 0 at im_max
  std::array<std::size_t, kLabelCount> histogram{};

  cplx pixel_center(int col, int row) const noexcept;
  Label at(int col, int row) const { return labels.at(static_cast<std::size_t>(row) * width + col); }
};

/// classify_AR at every pixel centre.
LabelGrid classify_grid(const ExpSum& f, const Window& window, int width, int height, const GridParams& params);

// Fixed RGB colour for each label.
std::array<unsigned char, 3> label_color(Label label) noexcept;

// Binary PPM (P6, maxval 255).
std::string encode_ppm(const LabelGrid& grid);
void write_ppm(const std::string& path, const LabelGrid& grid);

}  // namespace expweb
