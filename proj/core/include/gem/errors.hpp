#pragma once

#include <stdexcept>
#include <string>

namespace gem {

// Error taxonomy shared by the library and the CLI. The CLI maps these onto
// exit codes: usage/precondition -> 1, data/schema -> 2, backend -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated call contract (bad argument, bad template, temperature != 0, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data (JSON schema mismatch, dataset violations,
// stale index cache).
class DataError : public Error {
 public:
  using Error::Error;
};

// A chat/embedding endpoint failed after the retry budget was spent.
class BackendError : public Error {
 public:
  BackendError(std::string message, int http_status = 0, bool retryable = false)
      : Error(std::move(message)), http_status_(http_status), retryable_(retryable) {}

  int http_status() const { return http_status_; }
  bool retryable() const { return retryable_; }

 private:
  int http_status_;
  bool retryable_;
};

// A model reply could not be parsed into the expected shape.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace gem
