#include "mvgof/errors.hpp"

namespace mvgof {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::UnknownAtom: return "UnknownAtom";
    case ErrorKind::EmptyBasis: return "EmptyBasis";
    case ErrorKind::BadFactor: return "BadFactor";
    case ErrorKind::InsufficientParticles: return "InsufficientParticles";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::CoefficientEvaluation: return "CoefficientEvaluation";
    case ErrorKind::NumericalBlowup: return "NumericalBlowup";
    case ErrorKind::SingularLambda: return "SingularLambda";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::NaNSlope: return "NaNSlope";
    case ErrorKind::ExperimentDegenerate: return "ExperimentDegenerate";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::CoefficientEvaluation:
    case ErrorKind::NumericalBlowup:
    case ErrorKind::SingularLambda:
    case ErrorKind::DegenerateData:
    case ErrorKind::DegenerateVariance:
    case ErrorKind::NaNSlope:
    case ErrorKind::ExperimentDegenerate:
      return true;
    default:
      return false;
  }
}

}  // namespace mvgof
