#include "expweb/sampling.hpp"

#include <cmath>

namespace expweb {

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

ShiftedHalton::ShiftedHalton(std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  shift_ = {u(eng), u(eng)};
}

std::array<double, 2> ShiftedHalton::point(std::uint64_t index) const {
  // Index 0 of the raw sequence is the origin; start at 1.
  double x = radical_inverse(index + 1, 2) + shift_[0];
  double y = radical_inverse(index + 1, 3) + shift_[1];
  return {x - std::floor(x), y - std::floor(y)};
}

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(chunk),
                    static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace expweb
