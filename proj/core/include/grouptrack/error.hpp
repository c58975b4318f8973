#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grouptrack {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A text file could not be parsed; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Structurally valid file whose content is inconsistent (e.g. mixed descriptor lengths).
class FormatError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

/// Inputs that are individually valid but do not agree with each other.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace grouptrack
