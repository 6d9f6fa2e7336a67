#include "pibounds/error.hpp"

namespace pibounds {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyMatrix: return "EmptyMatrix";
        case ErrorCode::NegativeMass: return "NegativeMass";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NotSurjective: return "NotSurjective";
        case ErrorCode::NotCanonical: return "NotCanonical";
        case ErrorCode::ZeroMarginal: return "ZeroMarginal";
        case ErrorCode::KOutOfRange: return "KOutOfRange";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::InvalidInertias: return "InvalidInertias";
        case ErrorCode::InfeasibleBox: return "InfeasibleBox";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NotAMajorizationPair: return "NotAMajorizationPair";
        case ErrorCode::MOutOfRange: return "MOutOfRange";
        case ErrorCode::NegativeTheta: return "NegativeTheta";
        case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace pibounds
