#pragma once

#include <stdexcept>
#include <string>

namespace selberg {

// Two families, mapped to CLI exit codes: domain-style failures (bad input,
// excluded parameter values) and numerical failures (precision, resolution,
// root isolation). Each concrete error derives from exactly one of them.

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LengthError : DomainError {
  using DomainError::DomainError;
};
struct NormalizationError : DomainError {
  using DomainError::DomainError;
};
struct InsufficientDataError : DomainError {
  using DomainError::DomainError;
};
struct PoleError : DomainError {
  using DomainError::DomainError;
};
struct SingularityError : DomainError {
  using DomainError::DomainError;
};
struct GeometryError : DomainError {
  using DomainError::DomainError;
};
struct RangeError : DomainError {
  using DomainError::DomainError;
};
struct ParseError : DomainError {
  using DomainError::DomainError;
};

struct PrecisionError : NumericalError {
  using NumericalError::NumericalError;
};
struct ResolutionError : NumericalError {
  using NumericalError::NumericalError;
};
struct BoundaryError : NumericalError {
  using NumericalError::NumericalError;
};
struct RefinementError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace selberg
