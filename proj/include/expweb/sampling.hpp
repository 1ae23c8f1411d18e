#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace expweb {

// Radical-inverse (van der Corput) value of index in the given prime base.
double radical_inverse(std::uint64_t index, unsigned base);

/// 2-D Halton sequence (bases 2, 3) with a seeded Cranley-Patterson shift,
/// so every seed gives a different but reproducible point set.
class ShiftedHalton {
 public:
  explicit ShiftedHalton(std::uint64_t seed);
  std::array<double, 2> point(std::uint64_t index) const;

 private:
  std::array<double, 2> shift_{};
};

// Pseudo-random engine for one fixed-size chunk of a sampling loop, keyed on
// (seed, stream, chunk) so results do not depend on scheduling.
std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk);

}  // namespace expweb
