#include <cstdlib>
#include <cstring>

#include "expweb/kernels.hpp"

namespace expweb::simd {

const char* to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(EXPWEB_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept {
  static const Isa chosen = [] {
    if (const char* env = std::getenv("EXPWEB_SIMD"); env && std::strcmp(env, "scalar") == 0) {
      return Isa::Scalar;
    }
    return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return chosen;
}

std::size_t psi_batch(Isa isa, const PsiPlan& plan, std::span<const double> zr, std::span<const double> zi,
                      PsiBatch& out) {
  if (zr.size() != zi.size()) throw Error(ErrorCode::InvalidArgument, "psi_batch: mismatched spans");
  if (out.size() < zr.size()) out.resize(zr.size());
  if (isa == Isa::Avx2 && !isa_supported(Isa::Avx2)) {
    throw Error(ErrorCode::InvalidArgument, "AVX2 kernel requested on a CPU without AVX2/FMA");
  }
#if defined(EXPWEB_HAVE_AVX2_TU)
  if (isa == Isa::Avx2) return detail::psi_batch_avx2(plan, zr.data(), zi.data(), zr.size(), out);
#endif
  return detail::psi_batch_scalar(plan, zr.data(), zi.data(), 0, zr.size(), out);
}

}  // namespace expweb::simd
