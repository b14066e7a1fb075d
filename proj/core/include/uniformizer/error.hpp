#pragma once

#include <stdexcept>
#include <string>

namespace uniformizer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (t <= 0, theta <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Tabulated data queried outside its sample range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Two vertices lie in different connected components.
class UnreachableError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invariant-violating input. `line` is 1-based, 0 when unknown.
class InputError : public Error {
 public:
  explicit InputError(const std::string& message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line),
        detail_(message) {}

  int line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  int line_;
  std::string detail_;
};

/// Invariant violation attributed to one item of a vertex or edge list, so that
/// loaders can translate it to a source line.
class InvariantViolation : public InputError {
 public:
  enum class Section { vertices, edges, global };

  InvariantViolation(Section section, std::size_t index, const std::string& message)
      : InputError(message), section_(section), index_(index) {}

  Section section() const noexcept { return section_; }
  std::size_t index() const noexcept { return index_; }

 private:
  Section section_;
  std::size_t index_;
};

}  // namespace uniformizer
