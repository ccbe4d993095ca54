#pragma once

#include <stdexcept>
#include <string>

namespace homog {

enum class ErrorKind {
  Validation,
  UnsupportedDimension,
  UnsupportedDensity,
  Domain,
  QuadratureFailure,
  ExponentOutOfRange,
  NotLevyMeasure,
  TableBuildFailure,
  NormalizationMismatch,
  InternalConsistency,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::UnsupportedDensity: return "UnsupportedDensity";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorKind::NotLevyMeasure: return "NotLevyMeasure";
    case ErrorKind::TableBuildFailure: return "TableBuildFailure";
    case ErrorKind::NormalizationMismatch: return "NormalizationMismatch";
    case ErrorKind::InternalConsistency: return "InternalConsistencyError";
  }
  return "Error";
}

}  // namespace homog
