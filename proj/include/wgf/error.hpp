#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wgf {

enum class ErrorKind {
  AllZero,
  OutOfDomain,
  NonMonotoneMap,
  DegenerateSupport,
  DimensionMismatch,
  InnerDiverged,
  NotPositiveDefinite,
  KernelUnderflow,
  CFLViolation,
  NegativityDetected,
  NonpositiveTime,
  UnknownField,
  InvalidArgument,
  ConfigInvalid,
  CheckFailed,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library exception. Every failure carries a machine-readable kind so callers
/// (tests, the CLI exit-code logic) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when an explicit step is requested with a time step above the stability bound.
class CFLViolation : public Error {
 public:
  CFLViolation(const std::string& what, double admissible_dt)
      : Error(ErrorKind::CFLViolation, what), admissible_dt_(admissible_dt) {}

  double admissible_dt() const noexcept { return admissible_dt_; }

 private:
  double admissible_dt_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) raise(kind, what);
}

}  // namespace wgf
