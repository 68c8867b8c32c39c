#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cruciverba {

// Machine-readable failure reasons. The names double as the reason codes
// reported by the CLI and the HTTP API.
enum class ErrorCode {
  kInvalidArgument,
  kInvalidConfig,
  kNotFound,
  kNetwork,
  kRateLimited,
  kParseFailure,
  kMissingPlaceholder,
  kEmptyContext,
  kUnparseableResponse,
  kAuthFailure,
  kTimeout,
  kMalformedResponse,
  kUpstreamError,
  kFixtureMissing,
  kEmptyCorpus,
  kKeyMismatch,
  kDuplicateRecord,
  kInvariantViolation,
  kSchemaError,
  kIoError,
  kEmptySet,
  kEmptyAfterNormalization,
  kNoPlacement,
  kInvalidLayout,
  kEmptySelection,
  kCurationRejected,
};

std::string_view to_string(ErrorCode code);

// Process exit status for a failure: 10 plus the enumerator's position
// (InvalidArgument = 10, InvalidConfig = 11, ...). 2 is left for usage errors.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cruciverba
