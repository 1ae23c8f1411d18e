#include "expweb/tower.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "expweb/error.hpp"

namespace expweb {
namespace {

constexpr double kE = 2.718281828459045;
constexpr int kNudgeUlps = 4;
// exp() of anything above this is not representable.
constexpr double kExpLimit = 709.0;

double nudge(double x, Rounding r) {
  if (r == Rounding::Nearest) return x;
  const double dir = r == Rounding::Up ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kNudgeUlps; ++i) x = std::nextafter(x, dir);
  return x;
}

}  // namespace

const char* to_string(TriState t) noexcept {
  switch (t) {
    case TriState::True: return "true";
    case TriState::False: return "false";
    case TriState::Undetermined: return "undetermined";
  }
  return "?";
}

TowerReal TowerReal::normalized(int height, double top, Rounding r) {
  if (!std::isfinite(top)) throw Error(ErrorCode::InvalidArgument, "tower top must be finite");
  while (top >= kE) {
    top = nudge(std::log(top), r);
    ++height;
  }
  while (height >= 1 && top < 1.0) {
    top = nudge(std::exp(top), r);
    --height;
  }
  return TowerReal(height, top);
}

TowerReal TowerReal::from_double(double v) { return normalized(0, v, Rounding::Nearest); }

TowerReal TowerReal::from_parts(int height, double top, Rounding r) {
  if (height < 0) throw Error(ErrorCode::InvalidArgument, "tower height must be nonnegative");
  return normalized(height, top, r);
}

bool TowerReal::is_canonical() const noexcept {
  if (height_ == 0) return top_ < kE;
  return top_ >= 1.0 && top_ < kE;
}

std::optional<double> TowerReal::to_double() const {
  double v = top_;
  for (int i = 0; i < height_; ++i) {
    if (v > kExpLimit) return std::nullopt;
    v = std::exp(v);
  }
  return v;
}

TowerReal TowerReal::exp(Rounding r) const { return normalized(height_ + 1, top_, r); }

TowerReal TowerReal::log(Rounding r) const {
  if (height_ >= 1) return normalized(height_ - 1, top_, r);
  if (top_ <= 0.0) throw Error(ErrorCode::InvalidArgument, "log of nonpositive tower");
  return normalized(0, nudge(std::log(top_), r), r);
}

TowerReal TowerReal::add(double c, Rounding r) const {
  if (c == 0.0) return *this;
  if (auto v = to_double(); v && std::abs(*v) < 1e300) {
    return normalized(0, nudge(*v + c, r), r);
  }
  // v = exp(L) with L >= ~690: v + c = exp(L + log1p(c / v)).  The
  // correction is far below one ulp of L, so only the rounding direction
  // matters.
  TowerReal L = log(Rounding::Nearest);
  if (L.height_ == 0) {
    const double delta = std::log1p(c * std::exp(-L.top_));
    L = normalized(0, L.top_ + delta, Rounding::Nearest);
  }
  if ((r == Rounding::Up && c > 0.0) || (r == Rounding::Down && c < 0.0)) {
    L = normalized(L.height_, nudge(L.top_, r), r);
  }
  return L.exp(r);
}

TowerReal TowerReal::scale(double factor, Rounding r) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "tower scale factor must be positive");
  if (factor == 1.0) return *this;
  if (auto v = to_double(); v && std::abs(*v) < 1e300) {
    return normalized(0, nudge(*v * factor, r), r);
  }
  return log(Rounding::Nearest).add(std::log(factor), r).exp(r);
}

std::strong_ordering TowerReal::operator<=>(const TowerReal& other) const noexcept {
  // Canonical towers of height >= 1 are >= e > any height-0 top.
  if (height_ != other.height_) return height_ <=> other.height_;
  if (top_ < other.top_) return std::strong_ordering::less;
  if (top_ > other.top_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string TowerReal::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (height_ == 0) {
    os << top_;
  } else {
    os << "exp^" << height_ << "(" << top_ << ")";
  }
  return os.str();
}

TriState certified_geq(const TowerReal& lhs_lo, const TowerReal& lhs_hi, const TowerReal& rhs_lo,
                       const TowerReal& rhs_hi) {
  if (lhs_lo >= rhs_hi) return TriState::True;
  if (lhs_hi < rhs_lo) return TriState::False;
  return TriState::Undetermined;
}

}  // namespace expweb
