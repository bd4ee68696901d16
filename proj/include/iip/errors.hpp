#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iip {

// Every failure raised by the library carries exactly one of these kinds.
// The CLI maps each kind to a fixed exit code and message prefix.
enum class ErrorKind {
  DegenerateGeometry,
  PolarSingularity,
  NonImpacting,
  EscapeVelocity,
  CircularGrazing,
  BelowSurface,
  ZeroEccentricity,
  AnomalySingularity,
  SensitivitySingularity,
  NoImpactWithinHorizon,
  DegenerateWindow,
  ConfigError,
  SubsurfaceState,
  MalformedInput,
};

inline constexpr ErrorKind kAllErrorKinds[] = {
    ErrorKind::DegenerateGeometry,    ErrorKind::PolarSingularity,
    ErrorKind::NonImpacting,          ErrorKind::EscapeVelocity,
    ErrorKind::CircularGrazing,       ErrorKind::BelowSurface,
    ErrorKind::ZeroEccentricity,      ErrorKind::AnomalySingularity,
    ErrorKind::SensitivitySingularity, ErrorKind::NoImpactWithinHorizon,
    ErrorKind::DegenerateWindow,      ErrorKind::ConfigError,
    ErrorKind::SubsurfaceState,       ErrorKind::MalformedInput,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::PolarSingularity: return "PolarSingularity";
    case ErrorKind::NonImpacting: return "NonImpacting";
    case ErrorKind::EscapeVelocity: return "EscapeVelocity";
    case ErrorKind::CircularGrazing: return "CircularGrazing";
    case ErrorKind::BelowSurface: return "BelowSurface";
    case ErrorKind::ZeroEccentricity: return "ZeroEccentricity";
    case ErrorKind::AnomalySingularity: return "AnomalySingularity";
    case ErrorKind::SensitivitySingularity: return "SensitivitySingularity";
    case ErrorKind::NoImpactWithinHorizon: return "NoImpactWithinHorizon";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::SubsurfaceState: return "SubsurfaceState";
    case ErrorKind::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

class IipError : public std::runtime_error {
 public:
  IipError(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace iip
