#include "wgf/error.hpp"

namespace wgf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::AllZero: return "AllZero";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NonMonotoneMap: return "NonMonotoneMap";
    case ErrorKind::DegenerateSupport: return "DegenerateSupport";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InnerDiverged: return "InnerDiverged";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::KernelUnderflow: return "KernelUnderflow";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::NegativityDetected: return "NegativityDetected";
    case ErrorKind::NonpositiveTime: return "NonpositiveTime";
    case ErrorKind::UnknownField: return "UnknownField";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::CheckFailed: return "CheckFailed";
  }
  return "Unknown";
}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace wgf
