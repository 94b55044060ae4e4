#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace omsim {

enum class ErrorCode {
    // configuration / usage
    ConfigError,
    InvalidArgument,
    BudgetExceeded,
    ShapeMismatch,
    // physics
    NonPositiveParameter,
    CoulombOverstrong,
    InvalidParams,
    NoConvergence,
    AmbiguousBranch,
    PolePassage,
    SingularA,
    SingularDenominator,
    StepTooLarge,
    NoTransparencyWindow,
    // time-domain integration
    StepFailure,
    Divergence,
    InsufficientSpan,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors that come from the physical model rather than from
/// malformed input (drives the CLI exit code).
bool is_physics_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace omsim
