#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Root of every error raised by the library. The CLI maps ValidationError
// subclasses to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside the domain of an operation (rho > 1, |nu| >= rho, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Preconditions on data (unsaturated inputs, mismatched time sets, ...).
class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The wavefunction would leave the allocated lattice.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class CollapseError : public Error {
 public:
  using Error::Error;
};

// The right half of the distribution carries no probability.
class UndefinedFrontError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qwalk
