#pragma once

#include <stdexcept>
#include <string>

namespace qrst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vertex id or other argument violates a precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A size guard (terminal count, root count, brute-force width) was exceeded.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// Malformed instance text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& reason)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + reason : reason), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Raised when an internal consistency check fails (a solver bug, not bad input).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qrst
