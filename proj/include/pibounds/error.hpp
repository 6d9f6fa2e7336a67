#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pibounds {

enum class ErrorCode {
    EmptyMatrix,
    NegativeMass,
    NotNormalized,
    NonFinite,
    ShapeMismatch,
    NotSurjective,
    NotCanonical,
    ZeroMarginal,
    KOutOfRange,
    NoConvergence,
    InvalidInertias,
    InfeasibleBox,
    LengthMismatch,
    NotAMajorizationPair,
    MOutOfRange,
    NegativeTheta,
    ThetaOutOfRange,
    TooLarge,
    InvalidArgument,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every validation failure in the library surfaces as this exception type.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pibounds
