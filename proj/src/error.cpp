#include "syndatum/error.hpp"

namespace syndatum {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidVariance: return "InvalidVariance";
    case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InfiniteDivergence: return "InfiniteDivergence";
    case ErrorCode::InvalidD: return "InvalidD";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TaskMismatch: return "TaskMismatch";
    case ErrorCode::EmptyOriginal: return "EmptyOriginal";
    case ErrorCode::UnsupportedQuadrature: return "UnsupportedQuadrature";
    case ErrorCode::Indeterminate: return "Indeterminate";
    case ErrorCode::InfiniteBound: return "InfiniteBound";
    case ErrorCode::UnknownBuiltin: return "UnknownBuiltin";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace syndatum
