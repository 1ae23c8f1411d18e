#pragma once

#include <compare>
#include <optional>
#include <string>

namespace expweb {

// Direction in which a TowerReal operation may round its result.  Up and Down
// give certified bounds: each step is nudged by a few ulps past the libm
// result, which covers the <1 ulp error of exp/log.
enum class Rounding { Nearest, Up, Down };

/// Level-index number: the value exp(exp(...exp(top))) with `height` exps.
///
/// Canonical form: top < e when height == 0, and top in [1, e) when
/// height >= 1.  Canonical values order lexicographically by (height, top),
/// which agrees with the order of the represented reals.
class TowerReal {
 public:
  TowerReal() = default;

  static TowerReal from_double(double v);
  static TowerReal from_parts(int height, double top, Rounding r = Rounding::Nearest);

  int height() const noexcept { return height_; }
  double top() const noexcept { return top_; }

  // The represented value if it fits in a double.
  std::optional<double> to_double() const;

  TowerReal exp(Rounding r = Rounding::Nearest) const;
  // Requires a positive value.
  TowerReal log(Rounding r = Rounding::Nearest) const;
  TowerReal add(double c, Rounding r = Rounding::Nearest) const;
  // Requires factor > 0.
  TowerReal scale(double factor, Rounding r = Rounding::Nearest) const;

  bool is_canonical() const noexcept;

  std::strong_ordering operator<=>(const TowerReal& other) const noexcept;
  bool operator==(const TowerReal& other) const noexcept = default;

  std::string to_string() const;

 private:
  TowerReal(int height, double top) : height_(height), top_(top) {}
  static TowerReal normalized(int height, double top, Rounding r);

  int height_ = 0;
  double top_ = 0.0;
};

// Pass/fail/undetermined outcome of comparing two interval-valued towers.
enum class TriState { True, False, Undetermined };

const char* to_string(TriState t) noexcept;

/// Is [lhs_lo, lhs_hi] >= [rhs_lo, rhs_hi]?  True when lhs_lo >= rhs_hi,
/// False when lhs_hi < rhs_lo, otherwise Undetermined.
TriState certified_geq(const TowerReal& lhs_lo, const TowerReal& lhs_hi,
                       const TowerReal& rhs_lo, const TowerReal& rhs_hi);

}  // namespace expweb
