#include "expweb/error.hpp"

namespace expweb {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ZeroValue: return "ZeroValue";
    case ErrorCode::NotExpanding: return "NotExpanding";
    case ErrorCode::MuNotExpanding: return "MuNotExpanding";
    case ErrorCode::NuTooSmall: return "NuTooSmall";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::DerivativeZero: return "DerivativeZero";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::BoxNotInSector: return "BoxNotInSector";
    case ErrorCode::ParamSearchFailed: return "ParamSearchFailed";
    case ErrorCode::WindingUnstable: return "WindingUnstable";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace expweb
