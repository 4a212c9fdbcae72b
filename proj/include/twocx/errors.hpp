#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twocx {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text or JSON input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Operands live over incompatible generator tuples or ranks.
class ContextError : public Error {
 public:
  using Error::Error;
};

/// A single move could not be applied.
class MoveError : public Error {
 public:
  using Error::Error;
};

/// A move script failed at `position` (0-based).
class ReplayError : public Error {
 public:
  ReplayError(std::size_t position, const std::string& what)
      : Error("move " + std::to_string(position + 1) + ": " + what), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A certificate or witness does not verify.
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace twocx
