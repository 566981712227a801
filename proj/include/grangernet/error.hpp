#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace grangernet {

enum class ErrorCode {
    CycleDetected,
    SelfLoop,
    DuplicateEdge,
    NodeIdOutOfRange,
    DimensionMismatch,
    NonFiniteInput,
    NonFiniteParameter,
    NonFinitePrediction,
    NonFiniteGradient,
    KTooLarge,
    DegenerateSampleSize,
    DomainError,
    AllOneBin,
    NoLabeledPairs,
    OneClassOnly,
    ParseError,
    ConfigError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. The code lets callers (the CLI in particular)
/// map failures to exit statuses without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::DuplicateEdge: return "DuplicateEdge";
        case ErrorCode::NodeIdOutOfRange: return "NodeIdOutOfRange";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::NonFiniteParameter: return "NonFiniteParameter";
        case ErrorCode::NonFinitePrediction: return "NonFinitePrediction";
        case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::DegenerateSampleSize: return "DegenerateSampleSize";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::AllOneBin: return "AllOneBin";
        case ErrorCode::NoLabeledPairs: return "NoLabeledPairs";
        case ErrorCode::OneClassOnly: return "OneClassOnly";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace grangernet
