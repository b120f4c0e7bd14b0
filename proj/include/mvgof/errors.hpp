#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvgof {

/// Failure categories raised by the library. Each maps to one CLI exit class.
enum class ErrorKind {
  // input / configuration
  EmptySample,
  NonFiniteInput,
  SizeMismatch,
  UnknownModel,
  InvalidParams,
  UnknownAtom,
  EmptyBasis,
  BadFactor,
  InsufficientParticles,
  TooLarge,
  TooFewSamples,
  InvalidArgument,
  ConfigError,
  IoError,
  // numerical degeneracy
  CoefficientEvaluation,
  NumericalBlowup,
  SingularLambda,
  DegenerateData,
  DegenerateVariance,
  NaNSlope,
  ExperimentDegenerate,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for the kinds that signal numerical degeneracy rather than bad input.
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mvgof
