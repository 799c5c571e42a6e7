#pragma once

#include "orchid/document.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace orchid {

namespace edit {

struct Append {
    BlockPayload payload;
    std::optional<BlockId> id; // generated when absent
};

struct Insert {
    std::size_t position = 0; // clamped to the block count
    BlockPayload payload;
    std::optional<BlockId> id;
};

struct Replace {
    BlockId block;
    BlockPayload payload;
};

struct Remove {
    BlockId block;
};

struct Rename {
    std::string title;
};

struct SetDefaultPersona {
    std::optional<DocumentId> persona;
};

} // namespace edit

using BlockEdit = std::variant<edit::Append, edit::Insert, edit::Replace, edit::Remove, edit::Rename,
                               edit::SetDefaultPersona>;

struct DocumentLinks {
    std::optional<DocumentId> default_persona;
    std::optional<TaskId> origin_task;
};

struct DocumentFilter {
    std::optional<DocumentKind> kind;
    std::string title_prefix;
};

struct StoreOptions {
    std::optional<std::uint64_t> seed;
    std::function<std::int64_t()> clock; // milliseconds; system clock when empty
    std::string home_title = "Home";
    std::string me_title = "Me";
};

/// Thread-safe CRUD store for one workspace. Every mutation is all-or-nothing
/// and bumps the touched documents' revision by exactly one.
class DocumentStore {
public:
    explicit DocumentStore(StoreOptions options = {});

    DocumentStore(const DocumentStore&) = delete;
    DocumentStore& operator=(const DocumentStore&) = delete;

    Document create_document(DocumentKind kind, std::string title, std::vector<BlockPayload> initial_blocks = {},
                             DocumentLinks links = {});

    Document update_document(const DocumentId& id, Revision expected_revision, std::span<const BlockEdit> edits);

    void delete_document(const DocumentId& id);

    Document get_document(const DocumentId& id) const;
    std::optional<Document> find_document(const DocumentId& id) const;

    /// Ordered by kind group, then title, then id.
    std::vector<Document> query_documents(const DocumentFilter& filter = {}) const;

    Workspace snapshot() const;

    DocumentId home_id() const;
    DocumentId me_id() const;

    std::optional<Goal> goal() const;
    void set_goal(std::optional<Goal> goal);
    Task update_task(const TaskId& id, const std::function<void(Task&)>& mutate);
    std::optional<Task> find_task(const TaskId& id) const;

    std::string export_workspace() const;
    Workspace import_workspace(std::string_view archive);

    /// Replaces the whole state; the workspace must satisfy check_invariants.
    void replace(Workspace workspace);

    BlockId new_block_id();
    TaskId new_task_id();

    /// Count of committed mutations since construction.
    std::uint64_t write_count() const noexcept { return writes_.load(); }

    static bool kind_precedes(DocumentKind a, DocumentKind b) noexcept;

private:
    std::int64_t now() const;
    void validate_document(const Document& doc) const; // caller holds lock
    void reindex(Document& doc) const;

    StoreOptions options_;
    mutable IdGenerator ids_;
    mutable std::shared_mutex mutex_;
    Workspace workspace_;
    DocumentId home_id_;
    std::atomic<std::uint64_t> writes_{0};
};

} // namespace orchid
