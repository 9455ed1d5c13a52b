#pragma once

#include <stdexcept>
#include <string>

namespace adjvad {

/// Base of every error raised by the library. The CLI maps each subclass to
/// a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, manifest, or CLI argument (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable, corrupt, or misordered input data (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Unsupported pixel or file format.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// Frames arrived out of order or duplicated.
class StreamError : public DataError {
 public:
  using DataError::DataError;
};

/// Filesystem failure; the message carries the path.
class IoError : public DataError {
 public:
  using DataError::DataError;
};

/// Labels or scores that cannot be evaluated.
class EvalError : public DataError {
 public:
  using DataError::DataError;
};

/// Tensor dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced or consumed by the numerical core (exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace adjvad
