#include "orchid/prompt_assembler.hpp"

#include "orchid/error.hpp"
#include "orchid/labeled_sections.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

namespace orchid {

namespace {

constexpr std::array<std::pair<TemplateId, std::string_view>, 10> kTemplateNames{{
    {TemplateId::ContextPrompt, "ContextPrompt"},
    {TemplateId::AskPersona, "AskPersona"},
    {TemplateId::AskNoPersona, "AskNoPersona"},
    {TemplateId::MasterPersona, "MasterPersona"},
    {TemplateId::MasterNoPersona, "MasterNoPersona"},
    {TemplateId::CritiquePersona, "CritiquePersona"},
    {TemplateId::CritiqueNoPersona, "CritiqueNoPersona"},
    {TemplateId::MakePersona, "MakePersona"},
    {TemplateId::Todo, "Todo"},
    {TemplateId::DoTask, "DoTask"},
}};

bool placeholder_char(char c) noexcept { return (c >= 'a' && c <= 'z') || c == '_'; }

// Walks the template grammar, calling on_literal for literal text and
// on_placeholder for each {name}.
template <typename Literal, typename Placeholder>
void scan(std::string_view text, Literal on_literal, Placeholder on_placeholder)
{
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '{') {
            if (i + 1 < text.size() && text[i + 1] == '{') {
                on_literal('{');
                i += 2;
                continue;
            }
            std::size_t j = i + 1;
            while (j < text.size() && placeholder_char(text[j])) {
                ++j;
            }
            if (j == i + 1 || j >= text.size() || text[j] != '}') {
                fail(ErrorCode::UnknownPlaceholder, "malformed placeholder at offset " + std::to_string(i));
            }
            on_placeholder(text.substr(i + 1, j - i - 1));
            i = j + 1;
            continue;
        }
        if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
            on_literal('}');
            i += 2;
            continue;
        }
        on_literal(c);
        ++i;
    }
}

// What the operation asks for when the component's prompt field is empty.
std::string_view default_instruction(OperationKind kind) noexcept
{
    switch (kind) {
    case OperationKind::Summarize: return "Summarize the documents.";
    case OperationKind::Critique: return "Critique the documents.";
    case OperationKind::Expand: return "Expand on the content of the documents.";
    case OperationKind::FindGaps: return "Find gaps and open questions in the documents.";
    case OperationKind::Reflect: return "Reflect on the progress towards the project goal.";
    case OperationKind::Revise: return "Revise the documents.";
    case OperationKind::Search: return "Search for information relevant to the documents.";
    default: return "";
    }
}

} // namespace

std::string_view to_string(TemplateId id) noexcept
{
    for (const auto& [t, name] : kTemplateNames) {
        if (t == id) {
            return name;
        }
    }
    return "?";
}

std::optional<TemplateId> template_id_from_string(std::string_view name) noexcept
{
    for (const auto& [t, text] : kTemplateNames) {
        if (text == name) {
            return t;
        }
    }
    return std::nullopt;
}

const std::set<std::string>& allowed_placeholders()
{
    static const std::set<std::string> names{
        "context", "prompt",       "task",          "persona",         "goal",      "preferences",
        "personal_preferences",    "design_preferences", "emotional_state", "objective", "exception",
    };
    return names;
}

std::set<std::string> template_placeholders(std::string_view text)
{
    std::set<std::string> out;
    scan(text, [](char) {}, [&](std::string_view name) { out.emplace(name); });
    return out;
}

std::set<std::string> template_placeholders(TemplateId id) { return template_placeholders(template_text(id)); }

TemplateId select_template(OperationKind kind, bool has_persona)
{
    switch (kind) {
    case OperationKind::InlinePrompt: return TemplateId::ContextPrompt;
    case OperationKind::Ask:
    case OperationKind::Search:
    case OperationKind::Summarize: return has_persona ? TemplateId::AskPersona : TemplateId::AskNoPersona;
    case OperationKind::FindGaps:
    case OperationKind::Revise:
    case OperationKind::Expand: return has_persona ? TemplateId::MasterPersona : TemplateId::MasterNoPersona;
    case OperationKind::Critique:
    case OperationKind::Reflect: return has_persona ? TemplateId::CritiquePersona : TemplateId::CritiqueNoPersona;
    case OperationKind::ExecuteGoal: return TemplateId::Todo;
    case OperationKind::DoTask: return TemplateId::DoTask;
    case OperationKind::GeneratePersona: return TemplateId::MakePersona;
    }
    fail(ErrorCode::UnsupportedOperation, "operation has no prompt template");
}

std::string escape_value(std::string_view value)
{
    std::string out;
    out.reserve(value.size());
    for (const char c : value) {
        if (c == '\'' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    return out;
}

std::string serialize_documents(const std::vector<BundleDocument>& documents)
{
    std::string out = "[";
    for (std::size_t i = 0; i < documents.size(); ++i) {
        if (i != 0) {
            out += ", ";
        }
        out += "{'title': '" + escape_value(documents[i].title) + "', 'text': '" + escape_value(documents[i].text) +
               "'}";
    }
    out += "]";
    return out;
}

std::string serialize_persona(const Persona& p)
{
    auto field = [](std::string_view key, std::string_view value) {
        return "'" + std::string(key) + "': '" + escape_value(value) + "'";
    };
    return "{" + field("name", p.name) + ", " + field("biography", p.biography) + ", " +
           field("skills", join(p.skills, ", ")) + ", " + field("expertise", join(p.expertise, ", ")) + ", " +
           field("personality_traits", join(p.personality_traits, ", ")) + ", " + field("work_style", p.work_style) +
           "}";
}

ParameterMap serialize_bundle(const ContextBundle& bundle, const OperationRequest& request,
                              std::optional<TemplateId> target)
{
    ParameterMap params;
    std::string prompt = request.prompt;
    if (trim(prompt).empty()) {
        prompt = std::string(default_instruction(request.kind));
    }
    params["context"] = serialize_documents(bundle.documents);
    params["prompt"] = escape_value(prompt);
    params["task"] = escape_value(prompt);
    if (bundle.persona) {
        params["persona"] = serialize_persona(bundle.persona->persona);
    } else if (request.kind == OperationKind::DoTask) {
        params["persona"] = std::string(kGenericTaskExecutor);
    }
    const std::string goal = escape_value(bundle.goal.value_or(""));
    params["goal"] = goal;
    params["objective"] = request.kind == OperationKind::ExecuteGoal ? escape_value(request.prompt) : goal;
    const std::string preferences = escape_value(bundle.profile ? bundle.profile->personal_preferences : "");
    params["preferences"] = preferences;
    params["personal_preferences"] = preferences;
    params["design_preferences"] = preferences;
    params["emotional_state"] = escape_value(bundle.profile ? bundle.profile->emotional_state : "");

    if (target) {
        for (const auto& name : template_placeholders(*target)) {
            if (!params.contains(name)) {
                fail(ErrorCode::MissingRequiredParameter,
                     std::string(to_string(*target)) + " needs {" + name + "} but the bundle has none");
            }
        }
    }
    return params;
}

std::string substitute(std::string_view text, const ParameterMap& params)
{
    std::string out;
    out.reserve(text.size() + 256);
    scan(
        text, [&](char c) { out.push_back(c); },
        [&](std::string_view name) {
            const std::string key(name);
            if (!allowed_placeholders().contains(key)) {
                fail(ErrorCode::UnknownPlaceholder, "unknown placeholder {" + key + "}");
            }
            auto it = params.find(key);
            if (it == params.end()) {
                fail(ErrorCode::MissingRequiredParameter, "missing parameter {" + key + "}");
            }
            out += it->second;
        });
    return out;
}

MetaPrompt render_meta_prompt(TemplateId id, const ParameterMap& params)
{
    const auto text = template_text(id);
    ParameterMap used;
    for (const auto& name : template_placeholders(text)) {
        if (auto it = params.find(name); it != params.end()) {
            used.emplace(name, it->second);
        }
    }
    MetaPrompt prompt;
    prompt.template_id = id;
    prompt.text = substitute(text, used);
    prompt.params_digest = params_digest(used);
    return prompt;
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string params_digest(const ParameterMap& params)
{
    std::string canonical;
    for (const auto& [key, value] : params) {
        canonical += std::to_string(key.size()) + ":" + key + std::to_string(value.size()) + ":" + value;
    }
    return sha256_hex(canonical).substr(0, 16);
}

} // namespace orchid
