#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thematic {

// Base for every error the library raises. The CLI maps each subclass to
// an exit code (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File missing, unreadable, or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input record. `line()` is 1-based; 0 means "not line-specific".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed data that violates a contract (duplicate ids, empty corpus,
// mismatched vector lengths, too-small samples).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad user configuration (out-of-range parameters, unknown keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a numeric routine.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace thematic
