#pragma once

#include <stdexcept>
#include <string>

namespace reluexact {

/// Base of every error raised by the library. `exit_code()` is what the CLI returns.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 4; }
};

/// Malformed input, violated precondition, or dimension mismatch.
class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// A configured work or size cap was hit before the computation finished.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// An internal consistency check failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace reluexact
