#include "orchid/error.hpp"
#include "orchid/ids.hpp"
#include "orchid/operation.hpp"
#include "orchid/operation_kind.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace orchid {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table, std::string_view name)
{
    for (const auto& [value, text] : table) {
        if (text == name) {
            return value;
        }
    }
    return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value)
{
    for (const auto& [candidate, text] : table) {
        if (candidate == value) {
            return text;
        }
    }
    return "?";
}

constexpr std::array<std::pair<OperationKind, std::string_view>, 12> kOperationNames{{
    {OperationKind::Ask, "Ask"},
    {OperationKind::Search, "Search"},
    {OperationKind::Critique, "Critique"},
    {OperationKind::Expand, "Expand"},
    {OperationKind::FindGaps, "FindGaps"},
    {OperationKind::Reflect, "Reflect"},
    {OperationKind::Revise, "Revise"},
    {OperationKind::Summarize, "Summarize"},
    {OperationKind::InlinePrompt, "InlinePrompt"},
    {OperationKind::ExecuteGoal, "ExecuteGoal"},
    {OperationKind::DoTask, "DoTask"},
    {OperationKind::GeneratePersona, "GeneratePersona"},
}};

constexpr std::array<std::pair<TemperatureLevel, std::string_view>, 3> kTemperatureNames{{
    {TemperatureLevel::Precise, "Precise"},
    {TemperatureLevel::Balanced, "Balanced"},
    {TemperatureLevel::Creative, "Creative"},
}};

constexpr std::array<std::pair<ErrorCode, std::string_view>, 27> kErrorNames{{
    {ErrorCode::NotFound, "NotFound"},
    {ErrorCode::DuplicateSingleton, "DuplicateSingleton"},
    {ErrorCode::EmptyTitle, "EmptyTitle"},
    {ErrorCode::RevisionConflict, "RevisionConflict"},
    {ErrorCode::ProtectedDocument, "ProtectedDocument"},
    {ErrorCode::InvalidReference, "InvalidReference"},
    {ErrorCode::InvalidPersonaPage, "InvalidPersonaPage"},
    {ErrorCode::MalformedArchive, "MalformedArchive"},
    {ErrorCode::VersionMismatch, "VersionMismatch"},
    {ErrorCode::UnknownHostPage, "UnknownHostPage"},
    {ErrorCode::ValidationError, "ValidationError"},
    {ErrorCode::UnsupportedOperation, "UnsupportedOperation"},
    {ErrorCode::MissingRequiredParameter, "MissingRequiredParameter"},
    {ErrorCode::UnknownPlaceholder, "UnknownPlaceholder"},
    {ErrorCode::InvalidState, "InvalidState"},
    {ErrorCode::EmptyObjective, "EmptyObjective"},
    {ErrorCode::EmptyPlan, "EmptyPlan"},
    {ErrorCode::MalformedPersona, "MalformedPersona"},
    {ErrorCode::AlreadyStarted, "AlreadyStarted"},
    {ErrorCode::NotStarted, "NotStarted"},
    {ErrorCode::DuplicateRecord, "DuplicateRecord"},
    {ErrorCode::ProviderError, "ProviderError"},
    {ErrorCode::Timeout, "Timeout"},
    {ErrorCode::RemoteError, "RemoteError"},
    {ErrorCode::Cancelled, "Cancelled"},
    {ErrorCode::InvalidConfig, "InvalidConfig"},
    {ErrorCode::BindError, "BindError"},
}};

} // namespace

std::string_view to_string(ErrorCode code) noexcept { return name_of(kErrorNames, code); }

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

IdGenerator::IdGenerator() : rng_(std::random_device{}()) {}

std::string IdGenerator::next(std::string_view prefix)
{
    static constexpr char kHex[] = "0123456789abcdef";
    std::uint64_t bits;
    {
        std::lock_guard lock(mutex_);
        bits = rng_();
    }
    std::string out(prefix);
    out.push_back('-');
    for (int i = 0; i < 12; ++i) {
        out.push_back(kHex[bits & 0xF]);
        bits >>= 4;
    }
    return out;
}

bool is_menu_operation(OperationKind kind) noexcept
{
    return std::find(kMenuOperations.begin(), kMenuOperations.end(), kind) != kMenuOperations.end();
}

std::string_view to_string(OperationKind kind) noexcept { return name_of(kOperationNames, kind); }

std::optional<OperationKind> operation_kind_from_string(std::string_view name) noexcept
{
    return lookup(kOperationNames, name);
}

std::string_view to_string(TemperatureLevel level) noexcept { return name_of(kTemperatureNames, level); }

std::optional<TemperatureLevel> temperature_level_from_string(std::string_view name) noexcept
{
    return lookup(kTemperatureNames, name);
}

void validate_request(const OperationRequest& request)
{
    if (request.kind == OperationKind::InlinePrompt) {
        if (!request.selection) {
            fail(ErrorCode::ValidationError, "inline prompt requires a selection");
        }
        const auto& sel = *request.selection;
        if (sel.start > sel.end || sel.text.size() != sel.end - sel.start) {
            fail(ErrorCode::ValidationError, "selection offsets do not match selection text");
        }
        return;
    }
    if (request.kind == OperationKind::ExecuteGoal) {
        if (request.prompt.find_first_not_of(" \t\r\n") == std::string::npos) {
            fail(ErrorCode::ValidationError, "goal execution requires an objective as prompt");
        }
    }
    if (!request.host_page || request.host_page->empty()) {
        fail(ErrorCode::ValidationError, std::string(to_string(request.kind)) + " requires a host page");
    }
}

} // namespace orchid
