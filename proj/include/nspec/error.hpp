#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nspec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed program or term text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A well-parsed program that violates a structural rule (undeclared symbol,
/// arity mismatch, extra variables on a right-hand side, reserved names).
class ProgramError : public Error {
 public:
  using Error::Error;
};

/// The program is outside the class an operation requires, e.g. needed
/// narrowing on a program that is not inductively sequential.
class ClassViolation : public Error {
 public:
  ClassViolation(const std::string& message, std::string function)
      : Error(message), function_(std::move(function)) {}

  const std::string& function() const { return function_; }

 private:
  std::string function_;
};

/// Global partial evaluation control gave up before reaching a closed set.
class ControlFailure : public Error {
 public:
  ControlFailure(const std::string& message, std::vector<std::string> uncovered)
      : Error(message), uncovered_(std::move(uncovered)) {}

  const std::vector<std::string>& uncovered() const { return uncovered_; }

 private:
  std::vector<std::string> uncovered_;
};

}  // namespace nspec
