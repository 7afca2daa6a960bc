#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace syndatum {

enum class ErrorCode {
  DimensionMismatch,
  InvalidLabel,
  NonFiniteValue,
  InvalidVariance,
  RejectionBudgetExceeded,
  SupportMismatch,
  InvalidGrid,
  InfiniteDivergence,
  InvalidD,
  InvalidArgument,
  SingularDesign,
  NonConvergence,
  TaskMismatch,
  EmptyOriginal,
  UnsupportedQuadrature,
  Indeterminate,
  InfiniteBound,
  UnknownBuiltin,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace syndatum
