#include "poolforge/error.h"

namespace poolforge {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kDomain: return "domain_error";
    case ErrorCode::kNumericFailure: return "numeric_failure";
    case ErrorCode::kImbalanceUncorrectable: return "imbalance_uncorrectable";
    case ErrorCode::kEmptyResult: return "empty_result";
    case ErrorCode::kUndefined: return "undefined";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace poolforge
