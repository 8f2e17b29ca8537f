#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace toda {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A user-supplied parameter is out of range. `parameter()` names it.
class ConfigurationError : public Error {
 public:
  ConfigurationError(std::string parameter, const std::string& message)
      : Error(parameter + ": " + message), parameter_(std::move(parameter)) {}
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

/// An input document violates its schema. `pointer()` is the JSON pointer of the
/// offending value ("" for the document root).
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : Error((pointer.empty() ? std::string("/") : pointer) + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

/// A mathematical argument lies outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Fields do not live on the same grid, or have the wrong node count.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Input data violates an invariant (negative density, non-finite value).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A boundary strategy cannot be applied to the given weight.
class StrategyError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration failed even after continuation.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, std::vector<double> history)
      : Error(message), history_(std::move(history)) {}
  /// Residual sup-norm after every accepted Newton step, across all stages.
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Should not happen for valid inputs.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace toda
