#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fitchain {

enum class ErrorCode {
    // parameter validation
    BranchCountTooSmall,
    LengthsNotStrictlyIncreasing,
    TrunkNotMaximal,
    WeightsInvalid,
    EpsilonOutOfRange,
    // engine
    DimensionMismatch,
    NotIrreducible,
    SolveFailed,
    StateSpaceTooLarge,
    UnknownState,
    // profiles
    NotClassA,
    NotClassB,
    WindowTooWide,
    InvalidProfile,
    // continuous time
    ToleranceUnreachable,
    // gallery
    KTooSmall,
    LTooSmall,
    // oracle
    TooLarge,
    // plumbing
    InvalidArgument,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::BranchCountTooSmall: return "BranchCountTooSmall";
    case ErrorCode::LengthsNotStrictlyIncreasing: return "LengthsNotStrictlyIncreasing";
    case ErrorCode::TrunkNotMaximal: return "TrunkNotMaximal";
    case ErrorCode::WeightsInvalid: return "WeightsInvalid";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::SolveFailed: return "SolveFailed";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::NotClassA: return "NotClassA";
    case ErrorCode::NotClassB: return "NotClassB";
    case ErrorCode::WindowTooWide: return "WindowTooWide";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::ToleranceUnreachable: return "ToleranceUnreachable";
    case ErrorCode::KTooSmall: return "KTooSmall";
    case ErrorCode::LTooSmall: return "LTooSmall";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Errors that mean "the input is malformed" as opposed to "the computation failed".
constexpr bool is_validation_error(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::BranchCountTooSmall:
    case ErrorCode::LengthsNotStrictlyIncreasing:
    case ErrorCode::TrunkNotMaximal:
    case ErrorCode::WeightsInvalid:
    case ErrorCode::EpsilonOutOfRange:
    case ErrorCode::UnknownState:
    case ErrorCode::NotClassA:
    case ErrorCode::NotClassB:
    case ErrorCode::WindowTooWide:
    case ErrorCode::InvalidProfile:
    case ErrorCode::KTooSmall:
    case ErrorCode::LTooSmall:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace fitchain
