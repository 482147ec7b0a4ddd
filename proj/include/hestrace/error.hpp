#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hestrace {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries a 1-based line and column.
class ParseError : public Error {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

/// A fixpoint iteration ran past its configured cap.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

/// A Kleene chain stopped being a chain, or grew longer than the lattice height.
class MonotonicityViolation : public Error {
public:
  using Error::Error;
};

class LatticeTooLarge : public Error {
public:
  using Error::Error;
};

/// Automaton and input disagree on symbols or arities.
class AlphabetMismatch : public Error {
public:
  using Error::Error;
};

/// A decorated input's grade differs from the priority of the queried state.
class GradeMismatch : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

}  // namespace hestrace
