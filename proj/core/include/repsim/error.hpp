#ifndef REPSIM_ERROR_HPP
#define REPSIM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace repsim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (matmul inner dimension, example counts, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input is well-formed but carries no usable signal: constant activations,
/// zero variance, single-class labels, an empty class.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied parameter is outside its domain.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine exhausted its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

enum class IoErrorKind {
  kOpenFailed,
  kWriteFailed,
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kTrailingBytes,
  kDuplicateName,
  kInvalidTag,
  kInvalidName,
  kInvalidShape,
  kNonFiniteValue,
  kLabelOutOfRange,
  kMalformedText,
};

std::string_view toString(IoErrorKind kind) noexcept;

/// Reading or writing an interchange file failed. `kind()` identifies the
/// failure class so callers can react without parsing messages.
class IoError : public Error {
 public:
  IoError(IoErrorKind kind, const std::string& message)
      : Error(std::string(toString(kind)) + ": " + message), kind_(kind) {}

  IoErrorKind kind() const noexcept { return kind_; }

 private:
  IoErrorKind kind_;
};

}  // namespace repsim

#endif  // REPSIM_ERROR_HPP
