#pragma once

#include <stdexcept>
#include <string>

namespace sepint {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation requested on (or within the margin of) a declared singularity.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// A point or interval lies outside the domain where a function is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameters violate an entry's schema or a type invariant.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class UnknownEntryError : public Error {
 public:
  using Error::Error;
};

/// An operation's precondition does not hold (wrong coefficient pattern, hbar = 0 ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The requested derivative order is not provided by a potential.
class DerivativeUnavailableError : public Error {
 public:
  using Error::Error;
};

/// Numerical continuation reached a point where the implicit derivative vanishes.
class BranchTurningError : public Error {
 public:
  using Error::Error;
};

class SeedInvalidError : public Error {
 public:
  using Error::Error;
};

/// An ODE integration failed to make progress for reasons other than a detected pole.
class StepFailureError : public Error {
 public:
  using Error::Error;
};

}  // namespace sepint
