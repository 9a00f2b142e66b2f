#include "cdswarm/errors.hpp"

namespace cdswarm {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DegenerateBasis: return "DegenerateBasis";
        case ErrorCode::SingularDeformation: return "SingularDeformation";
        case ErrorCode::AgentOutsideTriangle: return "AgentOutsideTriangle";
        case ErrorCode::InfeasibleMargins: return "InfeasibleMargins";
        case ErrorCode::DeltaExceedsMax: return "DeltaExceedsMax";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::NoPath: return "NoPath";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::GoalOffGrid: return "GoalOffGrid";
        case ErrorCode::OutOfSegment: return "OutOfSegment";
        case ErrorCode::OutOfHorizon: return "OutOfHorizon";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::GimbalLock: return "GimbalLock";
        case ErrorCode::ThrustSingularity: return "ThrustSingularity";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

}  // namespace cdswarm
