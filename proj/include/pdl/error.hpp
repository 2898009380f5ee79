#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed concrete syntax. `position` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// An expression uses a constructor that its declared dialect does not allow,
/// or violates a well-formedness condition (sorts, connectedness, ...).
class ExprError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside of its supported fragment
/// (e.g. a tree-width 3 program given to the TW2 compiler).
class FragmentError : public Error {
 public:
  using Error::Error;
};

/// A configured resource budget (positions, nodes, enumeration size) was hit.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Invalid Kripke structure file or reference to an unknown world.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdl
