#include "intake/errors.hpp"

namespace intake {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::UnknownFeature: return "UnknownFeature";
        case ErrorCode::StrategyMismatch: return "StrategyMismatch";
        case ErrorCode::DuplicateFeatureId: return "DuplicateFeatureId";
        case ErrorCode::CountMismatch: return "CountMismatch";
        case ErrorCode::ItemCountMismatch: return "ItemCountMismatch";
        case ErrorCode::ItemOutOfRange: return "ItemOutOfRange";
        case ErrorCode::MissingContext: return "MissingContext";
        case ErrorCode::BackendFailure: return "BackendFailure";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::UnscriptedRequest: return "UnscriptedRequest";
        case ErrorCode::Transport: return "Transport";
        case ErrorCode::RateLimited: return "RateLimited";
        case ErrorCode::AuthFailure: return "AuthFailure";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::MissingScaleResponse: return "MissingScaleResponse";
        case ErrorCode::IncompleteReports: return "IncompleteReports";
        case ErrorCode::PlanInvalid: return "PlanInvalid";
        case ErrorCode::RatingIncomplete: return "RatingIncomplete";
        case ErrorCode::RoundLimitExceeded: return "RoundLimitExceeded";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
        case ErrorCode::DegenerateLabels: return "DegenerateLabels";
        case ErrorCode::InsufficientStratum: return "InsufficientStratum";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    }
    return "Unknown";
}

}  // namespace intake
