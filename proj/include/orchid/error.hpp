#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orchid {

enum class ErrorCode {
    NotFound,
    DuplicateSingleton,
    EmptyTitle,
    RevisionConflict,
    ProtectedDocument,
    InvalidReference,
    InvalidPersonaPage,
    MalformedArchive,
    VersionMismatch,
    UnknownHostPage,
    ValidationError,
    UnsupportedOperation,
    MissingRequiredParameter,
    UnknownPlaceholder,
    InvalidState,
    EmptyObjective,
    EmptyPlan,
    MalformedPersona,
    AlreadyStarted,
    NotStarted,
    DuplicateRecord,
    ProviderError,
    Timeout,
    RemoteError,
    Cancelled,
    InvalidConfig,
    BindError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library. The code is what callers branch
/// on; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

} // namespace orchid
