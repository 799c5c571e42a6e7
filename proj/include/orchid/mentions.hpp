#pragma once

#include "orchid/document.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orchid {

/// Lowercases ASCII letters and maps '_' to ' '. Byte length is preserved so
/// offsets in normalized text line up with the original.
std::string normalize_name(std::string_view name);

struct RegistryEntry {
    std::string name;
    DocumentId id;
    bool persona = false;
};

/// Names that '@' can refer to: document titles and persona names.
class NameRegistry {
public:
    /// Adds a name. On a normalized-name clash a persona replaces a plain
    /// document; otherwise the first registration stays.
    void add(std::string_view name, const DocumentId& id, bool persona);

    static NameRegistry from_workspace(const Workspace& workspace);

    const RegistryEntry* lookup(std::string_view name) const;

    /// Longest registered name that prefixes `text` and ends on a name
    /// boundary. Returns the entry and the matched byte length.
    std::optional<std::pair<const RegistryEntry*, std::size_t>> longest_match(std::string_view text) const;

    std::vector<RegistryEntry> entries() const;

private:
    std::map<std::string, RegistryEntry> by_name_;
    std::size_t longest_ = 0;
};

enum class MentionTarget { DocumentRef, PersonaRef, Unresolved };

std::string_view to_string(MentionTarget target) noexcept;

struct Mention {
    std::string raw; // includes the '@'
    MentionTarget target_kind = MentionTarget::Unresolved;
    std::optional<DocumentId> target;
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const Mention&) const = default;
};

bool is_name_char(char c) noexcept;

std::vector<Mention> parse_mentions(std::string_view text, const NameRegistry& names);

} // namespace orchid
