#pragma once
// Error taxonomy shared by every module. One exception type carrying a
// machine-readable code; validation paths return reports instead of throwing.

#include <stdexcept>
#include <string>
#include <string_view>

namespace intake {

enum class ErrorCode {
    // generic
    InvalidArgument,
    OutOfRange,
    ParseError,
    IoError,
    ConfigError,
    // profiles
    UnknownFeature,
    StrategyMismatch,
    DuplicateFeatureId,
    // scales
    CountMismatch,
    ItemCountMismatch,
    ItemOutOfRange,
    MissingContext,
    // backends
    BackendFailure,
    SchemaViolation,
    UnscriptedRequest,
    Transport,
    RateLimited,
    AuthFailure,
    Timeout,
    // agents / session
    MissingScaleResponse,
    IncompleteReports,
    PlanInvalid,
    RatingIncomplete,
    RoundLimitExceeded,
    // evaluation
    LengthMismatch,
    UnknownLabel,
    DegenerateMatrix,
    DegenerateLabels,
    InsufficientStratum,
    InsufficientData,
    MissingGroundTruth,
    EmptyCorpus,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace intake
