#pragma once

#include "orchid/ids.hpp"
#include "orchid/operation_kind.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace orchid {

enum class DocumentKind { Workbook, Context, Home, Me, Persona };

std::string_view to_string(DocumentKind kind) noexcept;
std::optional<DocumentKind> document_kind_from_string(std::string_view name) noexcept;

enum class BlockKind { Paragraph, OperationComponent, ResultBlock, GoalComponent, TaskComponent };

std::string_view to_string(BlockKind kind) noexcept;
std::optional<BlockKind> block_kind_from_string(std::string_view name) noexcept;

struct Paragraph {
    std::string text;
    bool operator==(const Paragraph&) const = default;
};

// A "/" operation component: the prompt field plus its action settings.
struct OperationComponent {
    OperationKind operation = OperationKind::Ask;
    std::string prompt;
    TemperatureLevel temperature = TemperatureLevel::Balanced;
    bool operator==(const OperationComponent&) const = default;
};

// Placeholder for an operation's result. Status, text and history live with
// the engine; the page only remembers which job currently backs the block.
struct ResultBlockRef {
    JobId job;
    bool operator==(const ResultBlockRef&) const = default;
};

struct GoalComponent {
    std::string objective;
    TemperatureLevel temperature = TemperatureLevel::Balanced;
    bool operator==(const GoalComponent&) const = default;
};

struct TaskComponent {
    TaskId task;
    bool operator==(const TaskComponent&) const = default;
};

using BlockPayload =
    std::variant<Paragraph, OperationComponent, ResultBlockRef, GoalComponent, TaskComponent>;

BlockKind kind_of(const BlockPayload& payload) noexcept;

struct Block {
    BlockId id;
    BlockPayload payload;
    std::size_t order = 0;

    BlockKind kind() const noexcept { return kind_of(payload); }
    bool operator==(const Block&) const = default;
};

struct Document {
    DocumentId id;
    DocumentKind kind = DocumentKind::Workbook;
    std::string title;
    std::vector<Block> blocks;
    std::optional<DocumentId> default_persona;
    std::optional<TaskId> origin_task;
    Revision revision = 0;
    std::int64_t created_ms = 0;
    std::int64_t updated_ms = 0;

    /// Paragraph texts joined by newlines; what a page contributes as context.
    std::string body_text() const;

    const Block* find_block(const BlockId& id) const noexcept;

    bool operator==(const Document&) const = default;
};

enum class TaskStatus { Open, Started };

std::string_view to_string(TaskStatus status) noexcept;

struct Task {
    TaskId id;
    std::string description;
    std::optional<DocumentId> persona;
    std::optional<DocumentId> working_page;
    std::vector<std::string> persona_history;
    TaskStatus status = TaskStatus::Open;

    bool operator==(const Task&) const = default;
};

struct Goal {
    std::string objective;
    std::vector<Task> tasks;

    const Task* find_task(const TaskId& id) const noexcept;
    bool operator==(const Goal&) const = default;
};

struct Workspace {
    std::map<DocumentId, Document> documents;
    std::optional<Goal> goal;

    const Document* find(const DocumentId& id) const noexcept;
    const Document* home() const noexcept;
    const Document* me() const noexcept;

    bool operator==(const Workspace&) const = default;
};

/// Checks the workspace-wide invariants (one Home, at most one Me, no
/// dangling references, contiguous block order). Returns a description of
/// the first violation, or nullopt.
std::optional<std::string> check_invariants(const Workspace& workspace);

} // namespace orchid
