#pragma once

#include <stdexcept>
#include <string>

namespace sdisp {

// Base of every error the library throws. The CLI maps the concrete type
// to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad arguments, out-of-range parameters, unreadable files.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed: non-convergence, blow-up, negative undershoot.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A structural hypothesis of the model does not hold for the requested
// discretization (kernel not resolved by the grid, wrap aliasing).
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

// Raised when a positive periodic solution is requested while the seasonal
// principal eigenvalue is nonnegative.
class ExtinctionRegime : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sdisp
