#pragma once

#include <stdexcept>
#include <string>

namespace porofix {

/// Invalid user-facing configuration. The message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base class for failures inside the numerical solvers.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sparse factorization failed or the solve missed its residual target.
class LinearSolveError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// The SIP elasticity operator is not positive definite on the free DOFs.
class IndefiniteOperatorError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace porofix
