#pragma once

#include <stdexcept>
#include <string>

namespace pam {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (bad alpha, bad kernel, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Requested instance exceeds a hard size limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Objects combined in one call were built from different fields or radii.
class ProvenanceError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed; indicates a bug or corrupted input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A deterministic scenario did not show the expected behaviour for its parameters.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace pam
