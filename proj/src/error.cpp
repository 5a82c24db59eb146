// SPDX-License-Identifier: Apache-2.0
#include "metahet/error.hpp"

namespace metahet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InsufficientStudies: return "InsufficientStudies";
    case ErrorCode::InvalidVariance: return "InvalidVariance";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::InvalidAdjustedSize: return "InvalidAdjustedSize";
    case ErrorCode::InsufficientDegreesOfFreedom: return "InsufficientDegreesOfFreedom";
    case ErrorCode::InvalidStudy: return "InvalidStudy";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InsufficientSample: return "InsufficientSample";
    case ErrorCode::MissingArmDetail: return "MissingArmDetail";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

std::string_view owning_module(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InsufficientStudies:
    case ErrorCode::InvalidVariance:
    case ErrorCode::DegenerateWeights:
    case ErrorCode::InvalidAdjustedSize:
    case ErrorCode::InsufficientDegreesOfFreedom:
    case ErrorCode::MissingArmDetail:
    case ErrorCode::InvalidArgument:
      return "model-core";
    case ErrorCode::InvalidStudy:
    case ErrorCode::DegenerateVariance:
      return "effect-sizes";
    case ErrorCode::InsufficientSample:
    case ErrorCode::InvalidConfig:
      return "simulation";
    case ErrorCode::ParseError:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::UsageError:
      return "cli-io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

std::string Error::qualified_code() const {
  std::string out(owning_module(code_));
  out += '/';
  out += to_string(code_);
  return out;
}

InputError::InputError(ErrorCode code, std::size_t row, const std::string& message)
    : Error(code, row == 0 ? message : "row " + std::to_string(row) + ": " + message),
      row_(row) {}

}  // namespace metahet
