#pragma once

#include <stdexcept>
#include <string>

namespace spdc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A quadrature or iterative refinement did not reach its tolerance.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// An eigensolver failed to converge or a residual check failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The retained spectrum misses too much of the total mass.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a precondition on normalization or ordering.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Two objects that must share a grid do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A requested OAM index has no stored decomposition.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A requested radial index lies beyond the retained set.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The operation is not defined for the selected phase-matching kind.
class UnsupportedKindError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fitting failed or its inputs were insufficient.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace spdc
