#include "leadform/errors.hpp"

namespace leadform {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateEdge: return "DuplicateEdge";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::NonSquare: return "NonSquare";
        case ErrorCode::LimitExceeded: return "LimitExceeded";
        case ErrorCode::NotPerfectMatching: return "NotPerfectMatching";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::StructuralViolation: return "StructuralViolation";
        case ErrorCode::PoleCountMismatch: return "PoleCountMismatch";
        case ErrorCode::ZeroFollowerPole: return "ZeroFollowerPole";
        case ErrorCode::RowUnsolvable: return "RowUnsolvable";
        case ErrorCode::PolicyMismatch: return "PolicyMismatch";
        case ErrorCode::PinnedInconsistent: return "PinnedInconsistent";
        case ErrorCode::IncompleteGains: return "IncompleteGains";
        case ErrorCode::MissingOffset: return "MissingOffset";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::InconsistentOffsets: return "InconsistentOffsets";
        case ErrorCode::UnstableStep: return "UnstableStep";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SignalBelowFloor: return "SignalBelowFloor";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace leadform
