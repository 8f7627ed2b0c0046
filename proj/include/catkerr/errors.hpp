#pragma once

#include <stdexcept>
#include <string>

namespace catkerr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTruncation : public Error {
 public:
  using Error::Error;
};

/// The Fock cutoff is too small for the requested amplitude.
class TruncationInadequate : public Error {
 public:
  TruncationInadequate(const std::string& what, int suggested_n)
      : Error(what + " (suggested N >= " + std::to_string(suggested_n) + ")"),
        suggested_n_(suggested_n) {}
  int suggested_n() const noexcept { return suggested_n_; }

 private:
  int suggested_n_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class IllConditionedBasis : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Raised by the integrators and steady-state solvers.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class StiffnessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AccuracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace catkerr
