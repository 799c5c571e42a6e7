#include "orchid/context_resolver.hpp"

#include "orchid/error.hpp"
#include "orchid/labeled_sections.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace orchid {

namespace {

constexpr std::array<std::pair<GroundingSource, std::string_view>, 6> kSourceNames{{
    {GroundingSource::ExplicitMention, "ExplicitMention"},
    {GroundingSource::HostPage, "HostPage"},
    {GroundingSource::PageReference, "PageReference"},
    {GroundingSource::InlineSelection, "InlineSelection"},
    {GroundingSource::DefaultPersona, "DefaultPersona"},
    {GroundingSource::MentionPersona, "MentionPersona"},
}};

constexpr std::array<std::string_view, 3> kMeLabels = {"Emotional state", "Preferences", "Working style"};

BundleDocument capture(const Document& doc, GroundingSource source)
{
    return BundleDocument{doc.id, doc.title, doc.body_text(), source, doc.revision};
}

std::optional<BundlePersona> load_persona(const Workspace& workspace, const DocumentId& id, GroundingSource source)
{
    const auto* doc = workspace.find(id);
    if (doc == nullptr || doc->kind != DocumentKind::Persona) {
        return std::nullopt;
    }
    auto persona = parse_persona_page(doc->body_text());
    if (!persona) {
        return std::nullopt;
    }
    return BundlePersona{doc->id, *std::move(persona), source};
}

void check_selection(const SelectionRange& selection, const Workspace& workspace)
{
    const auto* doc = workspace.find(selection.document);
    if (doc == nullptr) {
        return; // page gone; the selected text still stands on its own
    }
    const auto* block = doc->find_block(selection.block);
    if (block == nullptr) {
        return;
    }
    const auto* paragraph = std::get_if<Paragraph>(&block->payload);
    if (paragraph == nullptr) {
        return;
    }
    if (selection.end > paragraph->text.size() ||
        paragraph->text.compare(selection.start, selection.end - selection.start, selection.text) != 0) {
        fail(ErrorCode::ValidationError, "selection text does not match the block at the given offsets");
    }
}

} // namespace

std::string_view to_string(GroundingSource source) noexcept
{
    for (const auto& [s, name] : kSourceNames) {
        if (s == source) {
            return name;
        }
    }
    return "?";
}

std::optional<GroundingSource> grounding_source_from_string(std::string_view name) noexcept
{
    for (const auto& [s, text] : kSourceNames) {
        if (text == name) {
            return s;
        }
    }
    return std::nullopt;
}

MeProfile extract_me_profile(const Document& me_page)
{
    auto sections = parse_labeled_sections(me_page.body_text(), kMeLabels);
    auto value = [&](std::string_view label) {
        auto it = sections.values.find(std::string(label));
        return it == sections.values.end() ? std::string{} : it->second;
    };
    MeProfile profile;
    profile.emotional_state = value("Emotional state");
    profile.working_style = value("Working style");
    auto labeled = value("Preferences");
    if (!sections.unlabeled.empty() && !labeled.empty()) {
        profile.personal_preferences = sections.unlabeled + "\n" + labeled;
    } else {
        profile.personal_preferences = sections.unlabeled.empty() ? labeled : sections.unlabeled;
    }
    return profile;
}

std::vector<DocumentId> collect_page_references(const Document& page, const NameRegistry& names)
{
    std::vector<DocumentId> out;
    std::set<DocumentId> seen{page.id};
    for (const auto& block : page.blocks) {
        const auto* paragraph = std::get_if<Paragraph>(&block.payload);
        if (paragraph == nullptr) {
            continue;
        }
        for (const auto& mention : parse_mentions(paragraph->text, names)) {
            if (mention.target_kind == MentionTarget::DocumentRef && seen.insert(*mention.target).second) {
                out.push_back(*mention.target);
            }
        }
    }
    return out;
}

ContextBundle resolve_grounding(const OperationRequest& request, const Workspace& workspace)
{
    const bool inline_prompt = request.kind == OperationKind::InlinePrompt;
    const Document* host = nullptr;
    if (inline_prompt) {
        if (!request.selection) {
            fail(ErrorCode::ValidationError, "inline prompt requires a selection");
        }
        check_selection(*request.selection, workspace);
    } else {
        if (!request.host_page || (host = workspace.find(*request.host_page)) == nullptr) {
            fail(ErrorCode::UnknownHostPage,
                 "host page " + (request.host_page ? request.host_page->value() : std::string("<none>")) +
                     " does not exist");
        }
    }

    const auto names = NameRegistry::from_workspace(workspace);
    ContextBundle bundle;
    bundle.mentions = parse_mentions(request.prompt, names);

    std::vector<DocumentId> explicit_docs;
    for (const auto& mention : bundle.mentions) {
        switch (mention.target_kind) {
        case MentionTarget::Unresolved:
            bundle.warnings.push_back("unresolved mention " + mention.raw);
            break;
        case MentionTarget::PersonaRef:
            if (!bundle.persona) {
                bundle.persona = load_persona(workspace, *mention.target, GroundingSource::MentionPersona);
            } else if (bundle.persona->id != *mention.target) {
                bundle.warnings.push_back("additional persona mention " + mention.raw + " ignored");
            }
            break;
        case MentionTarget::DocumentRef:
            explicit_docs.push_back(*mention.target);
            break;
        }
    }

    std::set<DocumentId> seen;
    auto add = [&](const DocumentId& id, GroundingSource source) {
        if (!seen.insert(id).second) {
            return;
        }
        if (const auto* doc = workspace.find(id)) {
            bundle.documents.push_back(capture(*doc, source));
        }
    };

    if (inline_prompt) {
        const auto& selection = *request.selection;
        const auto* source_doc = workspace.find(selection.document);
        bundle.documents.push_back(BundleDocument{std::nullopt, std::string(kSelectionTitle), selection.text,
                                                  GroundingSource::InlineSelection,
                                                  source_doc != nullptr ? source_doc->revision : 0});
        for (const auto& id : explicit_docs) {
            add(id, GroundingSource::ExplicitMention);
        }
    } else {
        for (const auto& id : explicit_docs) {
            add(id, GroundingSource::ExplicitMention);
        }
        add(host->id, GroundingSource::HostPage);
        for (const auto& id : collect_page_references(*host, names)) {
            add(id, GroundingSource::PageReference);
        }
        if (!bundle.persona && host->default_persona) {
            bundle.persona = load_persona(workspace, *host->default_persona, GroundingSource::DefaultPersona);
        }
    }

    if (workspace.goal && !workspace.goal->objective.empty()) {
        bundle.goal = workspace.goal->objective;
    }
    if (const auto* me = workspace.me()) {
        bundle.profile = extract_me_profile(*me);
    }
    return bundle;
}

} // namespace orchid
