#pragma once

#include <stdexcept>
#include <string>

namespace gravint {

/// Bad user input: malformed documents, violated config invariants, values
/// outside an operation's domain. The CLI maps these to exit status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed on otherwise valid input. CLI exit status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class InfeasibleGeometryError : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedModelError : public InputError {
 public:
  using InputError::InputError;
};

class NoLimitError : public InputError {
 public:
  using InputError::InputError;
};

class GridError : public InputError {
 public:
  using InputError::InputError;
};

class MissingTrackError : public InputError {
 public:
  using InputError::InputError;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InstabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitError : public NumericalError {
 public:
  enum class Kind { kInsufficientSpan, kNonConvergence };

  FitError(Kind kind, const std::string& what)
      : NumericalError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace gravint
