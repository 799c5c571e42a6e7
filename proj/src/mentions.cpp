#include "orchid/mentions.hpp"

#include "orchid/document_store.hpp"
#include "orchid/labeled_sections.hpp"
#include "orchid/persona.hpp"

#include <algorithm>
#include <cctype>

namespace orchid {

std::string normalize_name(std::string_view name)
{
    std::string out(name);
    for (auto& c : out) {
        if (c == '_') {
            c = ' ';
        } else {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    return out;
}

bool is_name_char(char c) noexcept
{
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
}

std::string_view to_string(MentionTarget target) noexcept
{
    switch (target) {
    case MentionTarget::DocumentRef: return "DocumentRef";
    case MentionTarget::PersonaRef: return "PersonaRef";
    case MentionTarget::Unresolved: return "Unresolved";
    }
    return "?";
}

void NameRegistry::add(std::string_view name, const DocumentId& id, bool persona)
{
    auto trimmed = trim(name);
    if (trimmed.empty()) {
        return;
    }
    auto key = normalize_name(trimmed);
    auto [it, inserted] = by_name_.try_emplace(key, RegistryEntry{trimmed, id, persona});
    if (!inserted && persona && !it->second.persona) {
        it->second = RegistryEntry{trimmed, id, persona};
    }
    longest_ = std::max(longest_, key.size());
}

NameRegistry NameRegistry::from_workspace(const Workspace& workspace)
{
    std::vector<const Document*> docs;
    for (const auto& [id, doc] : workspace.documents) {
        docs.push_back(&doc);
    }
    std::sort(docs.begin(), docs.end(), [](const Document* a, const Document* b) {
        if (a->kind != b->kind) {
            return DocumentStore::kind_precedes(a->kind, b->kind);
        }
        return a->title != b->title ? a->title < b->title : a->id < b->id;
    });
    NameRegistry registry;
    for (const auto* doc : docs) {
        const bool persona = doc->kind == DocumentKind::Persona;
        registry.add(doc->title, doc->id, persona);
        if (persona) {
            if (auto parsed = parse_persona_page(doc->body_text())) {
                registry.add(parsed->name, doc->id, true);
            }
        }
    }
    return registry;
}

const RegistryEntry* NameRegistry::lookup(std::string_view name) const
{
    auto it = by_name_.find(normalize_name(name));
    return it == by_name_.end() ? nullptr : &it->second;
}

std::optional<std::pair<const RegistryEntry*, std::size_t>> NameRegistry::longest_match(std::string_view text) const
{
    const auto limit = std::min(longest_, text.size());
    const auto folded = normalize_name(text.substr(0, limit));
    for (auto len = limit; len > 0; --len) {
        if (len < text.size() && (std::isalnum(static_cast<unsigned char>(text[len])) != 0 || text[len] == '_')) {
            continue;
        }
        auto it = by_name_.find(folded.substr(0, len));
        if (it != by_name_.end()) {
            return std::pair{&it->second, len};
        }
    }
    return std::nullopt;
}

std::vector<RegistryEntry> NameRegistry::entries() const
{
    std::vector<RegistryEntry> out;
    out.reserve(by_name_.size());
    for (const auto& [key, entry] : by_name_) {
        out.push_back(entry);
    }
    return out;
}

std::vector<Mention> parse_mentions(std::string_view text, const NameRegistry& names)
{
    std::vector<Mention> out;
    std::size_t pos = 0;
    while ((pos = text.find('@', pos)) != std::string_view::npos) {
        const auto rest = text.substr(pos + 1);
        if (auto match = names.longest_match(rest)) {
            const auto end = pos + 1 + match->second;
            out.push_back(Mention{std::string(text.substr(pos, end - pos)),
                                  match->first->persona ? MentionTarget::PersonaRef : MentionTarget::DocumentRef,
                                  match->first->id, pos, end});
            pos = end;
            continue;
        }
        std::size_t len = 0;
        while (len < rest.size() && is_name_char(rest[len])) {
            ++len;
        }
        if (len == 0) {
            ++pos;
            continue;
        }
        const auto end = pos + 1 + len;
        out.push_back(Mention{std::string(text.substr(pos, end - pos)), MentionTarget::Unresolved, std::nullopt, pos, end});
        pos = end;
    }
    return out;
}

} // namespace orchid
