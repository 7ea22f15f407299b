#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctmlab {

/// Input violated a documented precondition or two artifacts do not fit together.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file or textual encoding could not be parsed.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A string was needed from a CTM table but is not in it.
class LookupError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctmlab
