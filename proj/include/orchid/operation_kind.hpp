#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace orchid {

enum class OperationKind {
    Ask,
    Search,
    Critique,
    Expand,
    FindGaps,
    Reflect,
    Revise,
    Summarize,
    InlinePrompt,
    ExecuteGoal,
    DoTask,
    GeneratePersona,
};

/// The eight creative operations offered by the "/" menu, in menu order.
inline constexpr std::array<OperationKind, 8> kMenuOperations = {
    OperationKind::Ask,      OperationKind::Search,  OperationKind::Critique, OperationKind::Expand,
    OperationKind::FindGaps, OperationKind::Reflect, OperationKind::Revise,   OperationKind::Summarize,
};

inline constexpr std::array<OperationKind, 12> kAllOperations = {
    OperationKind::Ask,         OperationKind::Search,       OperationKind::Critique,
    OperationKind::Expand,      OperationKind::FindGaps,     OperationKind::Reflect,
    OperationKind::Revise,      OperationKind::Summarize,    OperationKind::InlinePrompt,
    OperationKind::ExecuteGoal, OperationKind::DoTask,       OperationKind::GeneratePersona,
};

bool is_menu_operation(OperationKind kind) noexcept;

std::string_view to_string(OperationKind kind) noexcept;
std::optional<OperationKind> operation_kind_from_string(std::string_view name) noexcept;

enum class TemperatureLevel { Precise, Balanced, Creative };

inline constexpr std::array<TemperatureLevel, 3> kAllTemperatureLevels = {
    TemperatureLevel::Precise, TemperatureLevel::Balanced, TemperatureLevel::Creative};

std::string_view to_string(TemperatureLevel level) noexcept;
std::optional<TemperatureLevel> temperature_level_from_string(std::string_view name) noexcept;

} // namespace orchid
