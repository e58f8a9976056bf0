#pragma once

#include <stdexcept>
#include <string>

namespace spaceform {

// Argument shape mismatches: wrong vector length, block count, label count.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid configuration or weight vectors that violate a documented
// constraint (norm constraints, nonpositive curvature where positive is
// required, and the like).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numeric input outside an operator's domain: off-manifold points,
// transcendental arguments beyond the allowed clamp slack.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Degenerate geometric configuration (antipodal log, vanishing projection).
struct SingularityError : DomainError {
  using DomainError::DomainError;
};

// Malformed or inconsistent files and datasets.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : DataError {
  using DataError::DataError;
};

// Optimizer failed to produce a usable solution.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejection sampling made no progress.
struct GenerationStallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spaceform
