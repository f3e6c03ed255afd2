#pragma once

#include <stdexcept>
#include <string>

namespace fent {

// Base of every error the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured size bound (ball elements, pattern count, oracle support) was hit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// A system description violates one of its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed system-description text; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Caller passed something outside an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace fent
