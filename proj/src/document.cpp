#include "orchid/document.hpp"

#include <array>
#include <set>
#include <utility>

namespace orchid {

namespace {

constexpr std::array<std::pair<DocumentKind, std::string_view>, 5> kDocumentKinds{{
    {DocumentKind::Workbook, "Workbook"},
    {DocumentKind::Context, "Context"},
    {DocumentKind::Home, "Home"},
    {DocumentKind::Me, "Me"},
    {DocumentKind::Persona, "Persona"},
}};

constexpr std::array<std::pair<BlockKind, std::string_view>, 5> kBlockKinds{{
    {BlockKind::Paragraph, "Paragraph"},
    {BlockKind::OperationComponent, "OperationComponent"},
    {BlockKind::ResultBlock, "ResultBlock"},
    {BlockKind::GoalComponent, "GoalComponent"},
    {BlockKind::TaskComponent, "TaskComponent"},
}};

} // namespace

std::string_view to_string(DocumentKind kind) noexcept
{
    for (const auto& [k, name] : kDocumentKinds) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

std::optional<DocumentKind> document_kind_from_string(std::string_view name) noexcept
{
    for (const auto& [k, text] : kDocumentKinds) {
        if (text == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::string_view to_string(BlockKind kind) noexcept
{
    for (const auto& [k, name] : kBlockKinds) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

std::optional<BlockKind> block_kind_from_string(std::string_view name) noexcept
{
    for (const auto& [k, text] : kBlockKinds) {
        if (text == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::string_view to_string(TaskStatus status) noexcept
{
    return status == TaskStatus::Open ? "Open" : "Started";
}

BlockKind kind_of(const BlockPayload& payload) noexcept
{
    return static_cast<BlockKind>(payload.index());
}

std::string Document::body_text() const
{
    std::string out;
    bool first = true;
    for (const auto& block : blocks) {
        if (const auto* p = std::get_if<Paragraph>(&block.payload)) {
            if (!first) {
                out.push_back('\n');
            }
            out += p->text;
            first = false;
        }
    }
    return out;
}

const Block* Document::find_block(const BlockId& id) const noexcept
{
    for (const auto& block : blocks) {
        if (block.id == id) {
            return &block;
        }
    }
    return nullptr;
}

const Task* Goal::find_task(const TaskId& id) const noexcept
{
    for (const auto& task : tasks) {
        if (task.id == id) {
            return &task;
        }
    }
    return nullptr;
}

const Document* Workspace::find(const DocumentId& id) const noexcept
{
    auto it = documents.find(id);
    return it == documents.end() ? nullptr : &it->second;
}

const Document* Workspace::home() const noexcept
{
    for (const auto& [id, doc] : documents) {
        if (doc.kind == DocumentKind::Home) {
            return &doc;
        }
    }
    return nullptr;
}

const Document* Workspace::me() const noexcept
{
    for (const auto& [id, doc] : documents) {
        if (doc.kind == DocumentKind::Me) {
            return &doc;
        }
    }
    return nullptr;
}

std::optional<std::string> check_invariants(const Workspace& workspace)
{
    int homes = 0;
    int mes = 0;
    for (const auto& [id, doc] : workspace.documents) {
        if (id != doc.id || id.empty()) {
            return "document key does not match id " + doc.id.value();
        }
        if (doc.title.empty()) {
            return "document " + id.value() + " has an empty title";
        }
        if (doc.revision == 0) {
            return "document " + id.value() + " has revision 0";
        }
        homes += doc.kind == DocumentKind::Home;
        mes += doc.kind == DocumentKind::Me;
        std::set<BlockId> seen;
        for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
            const auto& block = doc.blocks[i];
            if (block.order != i) {
                return "document " + id.value() + " has non-contiguous block order";
            }
            if (block.id.empty() || !seen.insert(block.id).second) {
                return "document " + id.value() + " has a missing or duplicate block id";
            }
        }
        if (doc.default_persona) {
            const auto* persona = workspace.find(*doc.default_persona);
            if (persona == nullptr || persona->kind != DocumentKind::Persona) {
                return "document " + id.value() + " has a dangling default persona";
            }
        }
    }
    if (homes != 1) {
        return "workspace must have exactly one Home page";
    }
    if (mes > 1) {
        return "workspace has more than one Me page";
    }
    if (workspace.goal) {
        std::set<TaskId> ids;
        for (const auto& task : workspace.goal->tasks) {
            if (!ids.insert(task.id).second) {
                return "duplicate task id " + task.id.value();
            }
            if (task.persona && workspace.find(*task.persona) == nullptr) {
                return "task " + task.id.value() + " has a dangling persona";
            }
            if (task.working_page && workspace.find(*task.working_page) == nullptr) {
                return "task " + task.id.value() + " has a dangling working page";
            }
            if (task.working_page.has_value() != (task.status == TaskStatus::Started)) {
                return "task " + task.id.value() + " working page does not match its status";
            }
        }
    }
    return std::nullopt;
}

} // namespace orchid
