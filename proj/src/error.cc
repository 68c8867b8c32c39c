#include "cruciverba/error.h"

namespace cruciverba {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kNetwork: return "Network";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kParseFailure: return "ParseFailure";
    case ErrorCode::kMissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::kEmptyContext: return "EmptyContext";
    case ErrorCode::kUnparseableResponse: return "UnparseableResponse";
    case ErrorCode::kAuthFailure: return "AuthFailure";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kUpstreamError: return "UpstreamError";
    case ErrorCode::kFixtureMissing: return "FixtureMissing";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
    case ErrorCode::kDuplicateRecord: return "DuplicateRecord";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kEmptyAfterNormalization: return "EmptyAfterNormalization";
    case ErrorCode::kNoPlacement: return "NoPlacement";
    case ErrorCode::kInvalidLayout: return "InvalidLayout";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kCurationRejected: return "CurationRejected";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) { return 10 + static_cast<int>(code); }

}  // namespace cruciverba
