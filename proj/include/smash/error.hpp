#pragma once

#include <stdexcept>
#include <string>

namespace smash {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A machine failed validation or has inconsistent dimensions.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Symbols outside a machine's alphabet, or machines over different alphabets.
class AlphabetMismatch : public Error {
 public:
  using Error::Error;
};

/// A parameter is outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (scheme strings, files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The data cannot support the requested computation (too short, zero
/// variance, single class, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its cap before reaching the residual target.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace smash
