#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace s2i {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid skeleton format description or partition.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Arguments that violate an operation's precondition.
class ValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace s2i
