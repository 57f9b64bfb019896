#pragma once

#include <stdexcept>
#include <string>

namespace hedgeemd {

enum class ErrorCode {
    InvalidArgument,
    Parse,
    EmptyData,
    InsufficientData,
    SingularDesign,
    DegenerateFutures,
    EmptyAggregate,
    UndefinedCycle,
    Misaligned,
    AllGroupsExcluded,
};

// Broad class of a failure; the CLI maps these onto exit codes.
enum class ErrorCategory { Usage, Data, Numeric };

constexpr ErrorCategory category(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument:
        return ErrorCategory::Usage;
    case ErrorCode::Parse:
    case ErrorCode::EmptyData:
    case ErrorCode::Misaligned:
        return ErrorCategory::Data;
    default:
        return ErrorCategory::Numeric;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace hedgeemd
