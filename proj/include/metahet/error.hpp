// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace metahet {

enum class ErrorCode {
  InsufficientStudies,
  InvalidVariance,
  DegenerateWeights,
  InvalidAdjustedSize,
  InsufficientDegreesOfFreedom,
  InvalidStudy,
  DegenerateVariance,
  InsufficientSample,
  MissingArmDetail,
  InvalidArgument,
  InvalidConfig,
  ParseError,
  SchemaMismatch,
  UsageError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Module that owns an error code, e.g. "model-core" or "cli-io".
std::string_view owning_module(ErrorCode code) noexcept;

/// Base error for every failure raised by the library. The qualified code
/// ("model-core/DegenerateWeights") is stable and safe to match on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  std::string qualified_code() const;

 private:
  ErrorCode code_;
};

/// Raised while reading user input (CSV rows, config files). `row` is the
/// 1-based line number in the source file, 0 when not tied to a line.
class InputError : public Error {
 public:
  InputError(ErrorCode code, std::size_t row, const std::string& message);

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace metahet
