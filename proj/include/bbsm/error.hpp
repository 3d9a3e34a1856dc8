#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bbsm {

enum class ErrorCode {
    InvalidArgument,
    InputError,
    NonPositiveRiskless,
    ArbitrageViolation,
    DegenerateDiffusion,
    MaturityRestriction,
    NonPositiveForwardDenominator,
    ExcessPsiViolations,
    QOutOfRange,
    NonPositiveDiscount,
    TreeTooLarge,
    Unsupported,
    PerpetualUnsupported,
    InsufficientData,
    InfeasibleConstraint,
    NonConvergence,
    ZeroIndexScore,
};

constexpr std::string_view error_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InputError: return "InputError";
        case ErrorCode::NonPositiveRiskless: return "NonPositiveRiskless";
        case ErrorCode::ArbitrageViolation: return "ArbitrageViolation";
        case ErrorCode::DegenerateDiffusion: return "DegenerateDiffusion";
        case ErrorCode::MaturityRestriction: return "MaturityRestriction";
        case ErrorCode::NonPositiveForwardDenominator: return "NonPositiveForwardDenominator";
        case ErrorCode::ExcessPsiViolations: return "ExcessPsiViolations";
        case ErrorCode::QOutOfRange: return "QOutOfRange";
        case ErrorCode::NonPositiveDiscount: return "NonPositiveDiscount";
        case ErrorCode::TreeTooLarge: return "TreeTooLarge";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::PerpetualUnsupported: return "PerpetualUnsupported";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::InfeasibleConstraint: return "InfeasibleConstraint";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::ZeroIndexScore: return "ZeroIndexScore";
    }
    return "Unknown";
}

/// Input/config problems (bad arguments, malformed files) as opposed to
/// failures of the model or of a numerical method.
constexpr bool is_input_error(ErrorCode code) noexcept {
    return code == ErrorCode::InvalidArgument || code == ErrorCode::InputError;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, std::string_view what) {
    if (!condition) fail(code, std::string(what));
}

}  // namespace bbsm
