#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace poolforge {

enum class ErrorCode {
  kInvalidConfig,
  kParse,
  kNotFound,
  kDomain,
  kNumericFailure,
  kImbalanceUncorrectable,
  kEmptyResult,
  kUndefined,
  kConflict,
  kValidation,
  kIo,
};

// Stable lowercase name, used in JSON error bodies and CLI diagnostics.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace poolforge
