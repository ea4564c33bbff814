#ifndef CALOREX_ERROR_HPP
#define CALOREX_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace calorex {

enum class ErrorKind {
  OutOfSupportedRange,
  DegenerateRegime,
  QuadratureFailure,
  ShiftTooLarge,
  SlowConvergence,
  NonConvergence,
  ConfigError,
  ComplexResidue,
  VanishingHeatCapacity,
  StencilCrossesCriticalPoint,
  QuadratureNotConverged,
  NoBracket,
  SizeTooLarge,
  RegimeViolation,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::OutOfSupportedRange: return "OutOfSupportedRange";
    case ErrorKind::DegenerateRegime: return "DegenerateRegime";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::ShiftTooLarge: return "ShiftTooLarge";
    case ErrorKind::SlowConvergence: return "SlowConvergence";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ComplexResidue: return "ComplexResidue";
    case ErrorKind::VanishingHeatCapacity: return "VanishingHeatCapacity";
    case ErrorKind::StencilCrossesCriticalPoint: return "StencilCrossesCriticalPoint";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::SizeTooLarge: return "SizeTooLarge";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers what failed.
/// Iterative solvers attach their residual trajectory so a failed run is
/// still diagnosable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  Error(ErrorKind kind, const std::string& what, std::vector<double> history)
      : Error(kind, what) {
    history_ = std::move(history);
  }

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  ErrorKind kind_;
  std::vector<double> history_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace calorex

#endif  // CALOREX_ERROR_HPP
