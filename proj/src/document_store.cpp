#include "orchid/document_store.hpp"

#include "orchid/archive.hpp"
#include "orchid/error.hpp"
#include "orchid/persona.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <set>

namespace orchid {

namespace {

int kind_rank(DocumentKind kind) noexcept
{
    // sidebar grouping: home first, then workbook pages, then "My Context"
    switch (kind) {
    case DocumentKind::Home: return 0;
    case DocumentKind::Workbook: return 1;
    case DocumentKind::Context: return 2;
    case DocumentKind::Me: return 3;
    case DocumentKind::Persona: return 4;
    }
    return 5;
}

bool listing_less(const Document& a, const Document& b)
{
    if (a.kind != b.kind) {
        return kind_rank(a.kind) < kind_rank(b.kind);
    }
    if (a.title != b.title) {
        return a.title < b.title;
    }
    return a.id < b.id;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

} // namespace

bool DocumentStore::kind_precedes(DocumentKind a, DocumentKind b) noexcept { return kind_rank(a) < kind_rank(b); }

DocumentStore::DocumentStore(StoreOptions options)
    : options_(std::move(options)), ids_(options_.seed.value_or(std::random_device{}()))
{
    const auto t = now();
    Document home{DocumentId(ids_.next("doc")), DocumentKind::Home, options_.home_title, {}, {}, {}, 1, t, t};
    Document me{DocumentId(ids_.next("doc")), DocumentKind::Me, options_.me_title, {}, {}, {}, 1, t, t};
    home_id_ = home.id;
    workspace_.documents.emplace(home.id, std::move(home));
    workspace_.documents.emplace(me.id, std::move(me));
}

std::int64_t DocumentStore::now() const
{
    if (options_.clock) {
        return options_.clock();
    }
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void DocumentStore::reindex(Document& doc) const
{
    for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
        doc.blocks[i].order = i;
    }
}

void DocumentStore::validate_document(const Document& doc) const
{
    if (doc.title.find_first_not_of(" \t\r\n") == std::string::npos) {
        fail(ErrorCode::EmptyTitle, "document title must not be empty");
    }
    if (doc.default_persona) {
        const auto* persona = workspace_.find(*doc.default_persona);
        if (persona == nullptr || persona->kind != DocumentKind::Persona) {
            fail(ErrorCode::InvalidReference, "default persona " + doc.default_persona->value() +
                                                  " is not a persona page");
        }
    }
    if (doc.kind == DocumentKind::Persona && !parse_persona_page(doc.body_text())) {
        fail(ErrorCode::InvalidPersonaPage,
             "persona page needs non-empty Name, Biography, Skills, Expertise, Personality traits and Work style");
    }
    std::set<BlockId> ids;
    for (const auto& block : doc.blocks) {
        if (block.id.empty() || !ids.insert(block.id).second) {
            fail(ErrorCode::ValidationError, "duplicate block id in document " + doc.id.value());
        }
    }
}

Document DocumentStore::create_document(DocumentKind kind, std::string title, std::vector<BlockPayload> initial_blocks,
                                        DocumentLinks links)
{
    std::unique_lock lock(mutex_);
    if (kind == DocumentKind::Home || (kind == DocumentKind::Me && workspace_.me() != nullptr)) {
        fail(ErrorCode::DuplicateSingleton, "workspace already has a " + std::string(to_string(kind)) + " page");
    }
    const auto t = now();
    Document doc;
    doc.id = DocumentId(ids_.next("doc"));
    doc.kind = kind;
    doc.title = std::move(title);
    doc.default_persona = std::move(links.default_persona);
    doc.origin_task = std::move(links.origin_task);
    doc.revision = 1;
    doc.created_ms = t;
    doc.updated_ms = t;
    for (auto& payload : initial_blocks) {
        doc.blocks.push_back(Block{BlockId(ids_.next("blk")), std::move(payload), 0});
    }
    reindex(doc);
    validate_document(doc);
    workspace_.documents.emplace(doc.id, doc);
    ++writes_;
    return doc;
}

Document DocumentStore::update_document(const DocumentId& id, Revision expected_revision,
                                        std::span<const BlockEdit> edits)
{
    std::unique_lock lock(mutex_);
    auto it = workspace_.documents.find(id);
    if (it == workspace_.documents.end()) {
        fail(ErrorCode::NotFound, "no document " + id.value());
    }
    if (it->second.revision != expected_revision) {
        fail(ErrorCode::RevisionConflict, "document " + id.value() + " is at revision " +
                                              std::to_string(it->second.revision) + ", expected " +
                                              std::to_string(expected_revision));
    }
    Document doc = it->second;
    auto position_of = [&](const BlockId& block) {
        auto found = std::find_if(doc.blocks.begin(), doc.blocks.end(), [&](const Block& b) { return b.id == block; });
        if (found == doc.blocks.end()) {
            fail(ErrorCode::NotFound, "no block " + block.value() + " in document " + id.value());
        }
        return found;
    };
    for (const auto& e : edits) {
        std::visit(overloaded{
                       [&](const edit::Append& a) {
                           doc.blocks.push_back(Block{a.id.value_or(BlockId(ids_.next("blk"))), a.payload, 0});
                       },
                       [&](const edit::Insert& in) {
                           auto pos = std::min(in.position, doc.blocks.size());
                           doc.blocks.insert(doc.blocks.begin() + static_cast<std::ptrdiff_t>(pos),
                                             Block{in.id.value_or(BlockId(ids_.next("blk"))), in.payload, 0});
                       },
                       [&](const edit::Replace& r) { position_of(r.block)->payload = r.payload; },
                       [&](const edit::Remove& r) { doc.blocks.erase(position_of(r.block)); },
                       [&](const edit::Rename& r) { doc.title = r.title; },
                       [&](const edit::SetDefaultPersona& s) { doc.default_persona = s.persona; },
                   },
                   e);
        reindex(doc);
    }
    validate_document(doc);
    doc.revision += 1;
    doc.updated_ms = now();
    it->second = doc;
    ++writes_;
    return doc;
}

void DocumentStore::delete_document(const DocumentId& id)
{
    std::unique_lock lock(mutex_);
    auto it = workspace_.documents.find(id);
    if (it == workspace_.documents.end()) {
        fail(ErrorCode::NotFound, "no document " + id.value());
    }
    if (it->second.kind == DocumentKind::Home || it->second.kind == DocumentKind::Me) {
        fail(ErrorCode::ProtectedDocument, "the " + std::string(to_string(it->second.kind)) +
                                               " page cannot be deleted");
    }
    workspace_.documents.erase(it);
    const auto t = now();
    for (auto& [other_id, doc] : workspace_.documents) {
        if (doc.default_persona == id) {
            doc.default_persona.reset();
            doc.revision += 1;
            doc.updated_ms = t;
        }
    }
    if (workspace_.goal) {
        for (auto& task : workspace_.goal->tasks) {
            if (task.persona == id) {
                task.persona.reset();
            }
            if (task.working_page == id) {
                task.working_page.reset();
                task.status = TaskStatus::Open;
            }
        }
    }
    ++writes_;
}

Document DocumentStore::get_document(const DocumentId& id) const
{
    if (auto doc = find_document(id)) {
        return *std::move(doc);
    }
    fail(ErrorCode::NotFound, "no document " + id.value());
}

std::optional<Document> DocumentStore::find_document(const DocumentId& id) const
{
    std::shared_lock lock(mutex_);
    if (const auto* doc = workspace_.find(id)) {
        return *doc;
    }
    return std::nullopt;
}

std::vector<Document> DocumentStore::query_documents(const DocumentFilter& filter) const
{
    std::vector<Document> out;
    {
        std::shared_lock lock(mutex_);
        for (const auto& [id, doc] : workspace_.documents) {
            if (filter.kind && doc.kind != *filter.kind) {
                continue;
            }
            if (!doc.title.starts_with(filter.title_prefix)) {
                continue;
            }
            out.push_back(doc);
        }
    }
    std::sort(out.begin(), out.end(), listing_less);
    return out;
}

Workspace DocumentStore::snapshot() const
{
    std::shared_lock lock(mutex_);
    return workspace_;
}

DocumentId DocumentStore::home_id() const
{
    std::shared_lock lock(mutex_);
    return home_id_;
}

DocumentId DocumentStore::me_id() const
{
    std::shared_lock lock(mutex_);
    const auto* me = workspace_.me();
    if (me == nullptr) {
        fail(ErrorCode::NotFound, "workspace has no Me page");
    }
    return me->id;
}

std::optional<Goal> DocumentStore::goal() const
{
    std::shared_lock lock(mutex_);
    return workspace_.goal;
}

void DocumentStore::set_goal(std::optional<Goal> goal)
{
    std::unique_lock lock(mutex_);
    workspace_.goal = std::move(goal);
    ++writes_;
}

Task DocumentStore::update_task(const TaskId& id, const std::function<void(Task&)>& mutate)
{
    std::unique_lock lock(mutex_);
    if (workspace_.goal) {
        for (auto& task : workspace_.goal->tasks) {
            if (task.id == id) {
                Task copy = task;
                mutate(copy);
                if (copy.id != task.id) {
                    fail(ErrorCode::ValidationError, "task id cannot change");
                }
                if (copy.persona && workspace_.find(*copy.persona) == nullptr) {
                    fail(ErrorCode::InvalidReference, "task persona does not exist");
                }
                if (copy.persona_history.size() < task.persona_history.size()) {
                    fail(ErrorCode::ValidationError, "persona history is append-only");
                }
                task = copy;
                ++writes_;
                return task;
            }
        }
    }
    fail(ErrorCode::NotFound, "no task " + id.value());
}

std::optional<Task> DocumentStore::find_task(const TaskId& id) const
{
    std::shared_lock lock(mutex_);
    if (workspace_.goal) {
        if (const auto* task = workspace_.goal->find_task(id)) {
            return *task;
        }
    }
    return std::nullopt;
}

std::string DocumentStore::export_workspace() const
{
    return write_archive(ArchiveContents{snapshot(), {}});
}

Workspace DocumentStore::import_workspace(std::string_view archive)
{
    auto contents = read_archive(archive);
    replace(contents.workspace);
    return contents.workspace;
}

void DocumentStore::replace(Workspace workspace)
{
    if (auto problem = check_invariants(workspace)) {
        fail(ErrorCode::MalformedArchive, *problem);
    }
    std::unique_lock lock(mutex_);
    workspace_ = std::move(workspace);
    home_id_ = workspace_.home()->id;
    ++writes_;
}

BlockId DocumentStore::new_block_id() { return BlockId(ids_.next("blk")); }

TaskId DocumentStore::new_task_id() { return TaskId(ids_.next("task")); }

} // namespace orchid
