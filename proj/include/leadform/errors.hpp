#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leadform {

enum class ErrorCode {
    DuplicateEdge,
    SelfLoop,
    IndexOutOfRange,
    CycleDetected,
    NonSquare,
    LimitExceeded,
    NotPerfectMatching,
    TooLarge,
    StructuralViolation,
    PoleCountMismatch,
    ZeroFollowerPole,
    RowUnsolvable,
    PolicyMismatch,
    PinnedInconsistent,
    IncompleteGains,
    MissingOffset,
    Unreachable,
    InconsistentOffsets,
    UnstableStep,
    DimensionMismatch,
    SignalBelowFloor,
    ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI, the Python layer) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace leadform
