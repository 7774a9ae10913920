#pragma once

#include <stdexcept>
#include <string>

namespace hetcycle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration file or command line could not be interpreted.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An input lies outside the domain where an operation is defined
/// (e.g. a point on a stable manifold, a record that is too short).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (step-size underflow, blow-up, non-finite result).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Two systems were expected to share their conjugacy invariants but do not.
class InvariantMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace hetcycle
