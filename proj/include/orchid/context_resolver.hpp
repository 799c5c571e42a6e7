#pragma once

#include "orchid/document.hpp"
#include "orchid/mentions.hpp"
#include "orchid/operation.hpp"
#include "orchid/persona.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orchid {

enum class GroundingSource {
    ExplicitMention,
    HostPage,
    PageReference,
    InlineSelection,
    DefaultPersona,
    MentionPersona,
};

std::string_view to_string(GroundingSource source) noexcept;
std::optional<GroundingSource> grounding_source_from_string(std::string_view name) noexcept;

struct MeProfile {
    std::string emotional_state;
    std::string personal_preferences;
    std::string working_style;

    bool operator==(const MeProfile&) const = default;
};

/// Reads the labeled sections "Emotional state:", "Preferences:" and
/// "Working style:". Unlabeled text is folded into personal_preferences.
MeProfile extract_me_profile(const Document& me_page);

// Captured at resolution time so later edits do not leak into a submitted job.
struct BundleDocument {
    std::optional<DocumentId> id; // empty for an inline selection
    std::string title;
    std::string text;
    GroundingSource source = GroundingSource::HostPage;
    Revision revision = 0;

    bool operator==(const BundleDocument&) const = default;
};

struct BundlePersona {
    DocumentId id;
    Persona persona;
    GroundingSource source = GroundingSource::DefaultPersona;

    bool operator==(const BundlePersona&) const = default;
};

struct ContextBundle {
    std::vector<BundleDocument> documents;
    std::optional<BundlePersona> persona;
    std::optional<std::string> goal;
    std::optional<MeProfile> profile;
    std::vector<Mention> mentions;
    std::vector<std::string> warnings;

    bool operator==(const ContextBundle&) const = default;
};

inline constexpr std::string_view kSelectionTitle = "selection";

/// Resolved document mentions in the page's paragraphs, first occurrence
/// order, without following references any further.
std::vector<DocumentId> collect_page_references(const Document& page, const NameRegistry& names);

/// Applies the grounding precedence rules to produce the context for one
/// operation. Pure: the same request and workspace give the same bundle.
ContextBundle resolve_grounding(const OperationRequest& request, const Workspace& workspace);

} // namespace orchid
