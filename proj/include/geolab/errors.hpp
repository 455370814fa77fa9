#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geolab {

// Root of every error the library raises on bad input or missing data.
// The CLI maps DomainError-derived errors to exit code 1 and IoError to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A precondition on a caller-supplied object was violated
// (for example, a non-reduced form handed to reduction_step).
class ContractError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A trace table or zero table does not reach far enough for the request.
class CoverageError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Malformed text input; carries the 1-based line number.
class ParseError : public DomainError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DomainError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace geolab
