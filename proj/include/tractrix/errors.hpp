#pragma once

#include <stdexcept>
#include <string>

namespace tractrix {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Programming mistakes: points from the wrong space, malformed arguments.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A coordinate record violates its backend's constraint.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Geodesic-dependent operation requested beyond the uniqueness radius.
class NonUniqueGeodesicError : public Error {
 public:
  using Error::Error;
};

// The backend does not provide the requested operation (exp/log, geodesics).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A construction hypothesis failed. `witness` names the offending input.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, std::string witness = {})
      : Error(witness.empty() ? what : what + " (witness: " + witness + ")"),
        witness_(std::move(witness)) {}

  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

// Internal numeric inconsistency, e.g. an arccos argument far outside [-1, 1].
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Bad experiment configuration (unknown key, unparsable value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tractrix
