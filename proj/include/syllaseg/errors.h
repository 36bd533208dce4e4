/// @file errors.h
/// @brief Exception hierarchy shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace syllaseg {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input document (score JSON, ODF CSV, WAV, boundary JSON).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Operation input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// No feasible boundary sequence exists for the given inputs.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

}  // namespace syllaseg
