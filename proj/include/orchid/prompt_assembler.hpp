#pragma once

#include "orchid/context_resolver.hpp"
#include "orchid/operation.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace orchid {

enum class TemplateId {
    ContextPrompt,
    AskPersona,
    AskNoPersona,
    MasterPersona,
    MasterNoPersona,
    CritiquePersona,
    CritiqueNoPersona,
    MakePersona,
    Todo,
    DoTask,
};

inline constexpr std::array<TemplateId, 10> kAllTemplates = {
    TemplateId::ContextPrompt,   TemplateId::AskPersona,      TemplateId::AskNoPersona,
    TemplateId::MasterPersona,   TemplateId::MasterNoPersona, TemplateId::CritiquePersona,
    TemplateId::CritiqueNoPersona, TemplateId::MakePersona,   TemplateId::Todo,
    TemplateId::DoTask,
};

std::string_view to_string(TemplateId id) noexcept;
std::optional<TemplateId> template_id_from_string(std::string_view name) noexcept;

/// The stored template text, byte for byte.
std::string_view template_text(TemplateId id) noexcept;

/// Placeholder names a template references, in sorted order.
std::set<std::string> template_placeholders(TemplateId id);
std::set<std::string> template_placeholders(std::string_view text);

/// Placeholder names a template may use.
const std::set<std::string>& allowed_placeholders();

using ParameterMap = std::map<std::string, std::string>;

struct MetaPrompt {
    TemplateId template_id = TemplateId::AskNoPersona;
    std::string text;
    std::string params_digest;

    bool operator==(const MetaPrompt&) const = default;
};

/// Persona used in DoTask when none is attached, matching the template's
/// own wording for the generic case.
inline constexpr std::string_view kGenericTaskExecutor = "an AI task executor";

TemplateId select_template(OperationKind kind, bool has_persona);

/// Backslash-escapes single quotes and backslashes; newlines pass through.
std::string escape_value(std::string_view value);

/// "[{'title': ..., 'text': ...}, ...]" in bundle order.
std::string serialize_documents(const std::vector<BundleDocument>& documents);
std::string serialize_persona(const Persona& persona);

/// Builds every placeholder value the bundle can supply. When `target` is
/// given, checks that the template's placeholders are all covered.
ParameterMap serialize_bundle(const ContextBundle& bundle, const OperationRequest& request,
                              std::optional<TemplateId> target = std::nullopt);

/// Single-pass substitution: "{{" and "}}" become literal braces, {name} is
/// replaced, an unpaired '}' is copied through.
std::string substitute(std::string_view template_text, const ParameterMap& params);

MetaPrompt render_meta_prompt(TemplateId id, const ParameterMap& params);

/// Stable SHA-256 (hex, 16 chars) of the map's canonical encoding.
std::string params_digest(const ParameterMap& params);

/// Full SHA-256 hex of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

} // namespace orchid
