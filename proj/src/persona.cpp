#include "orchid/persona.hpp"

#include "orchid/error.hpp"
#include "orchid/labeled_sections.hpp"

#include <array>

#include <json.hpp>

namespace orchid {

namespace {

constexpr std::array<std::string_view, 6> kPageLabels = {
    "Name", "Biography", "Skills", "Expertise", "Personality traits", "Work style",
};

constexpr std::array<std::string_view, 6> kSchemaKeys = {
    "name", "biography", "skills", "expertise", "personality_traits", "work_style",
};

// Removes commas that directly precede a closing brace or bracket outside
// strings. Models copy the trailing comma from the schema in the prompt.
std::string drop_trailing_commas(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            out.push_back(c);
            if (c == '\\' && i + 1 < text.size()) {
                out.push_back(text[++i]);
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == ',') {
            auto next = text.find_first_not_of(" \t\r\n", i + 1);
            if (next != std::string_view::npos && (text[next] == '}' || text[next] == ']')) {
                continue;
            }
        }
        out.push_back(c);
    }
    return out;
}

std::string field_text(const nlohmann::json& object, std::string_view key)
{
    auto it = object.find(std::string(key));
    if (it == object.end()) {
        fail(ErrorCode::MalformedPersona, "persona is missing '" + std::string(key) + "'");
    }
    if (it->is_string()) {
        return trim(it->get<std::string>());
    }
    if (it->is_array()) {
        std::vector<std::string> parts;
        for (const auto& item : *it) {
            if (!item.is_string()) {
                fail(ErrorCode::MalformedPersona, "persona field '" + std::string(key) + "' is not text");
            }
            parts.push_back(trim(item.get<std::string>()));
        }
        return join(parts, ", ");
    }
    fail(ErrorCode::MalformedPersona, "persona field '" + std::string(key) + "' is not text");
}

bool complete(const Persona& p)
{
    return !p.name.empty() && !p.biography.empty() && !p.skills.empty() && !p.expertise.empty() &&
           !p.personality_traits.empty() && !p.work_style.empty();
}

} // namespace

std::vector<std::string> split_comma_list(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) {
            out.push_back(std::move(item));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& items, std::string_view separator)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i != 0) {
            out += separator;
        }
        out += items[i];
    }
    return out;
}

std::optional<Persona> parse_persona_page(std::string_view body)
{
    auto sections = parse_labeled_sections(body, kPageLabels);
    auto value = [&](std::string_view label) {
        auto it = sections.values.find(std::string(label));
        return it == sections.values.end() ? std::string{} : it->second;
    };
    Persona p;
    p.name = value("Name");
    p.biography = value("Biography");
    p.skills = split_comma_list(value("Skills"));
    p.expertise = split_comma_list(value("Expertise"));
    p.personality_traits = split_comma_list(value("Personality traits"));
    p.work_style = value("Work style");
    if (!complete(p)) {
        return std::nullopt;
    }
    return p;
}

std::vector<BlockPayload> persona_page_blocks(const Persona& p)
{
    return {
        Paragraph{"Name: " + p.name},
        Paragraph{"Biography: " + p.biography},
        Paragraph{"Skills: " + join(p.skills, ", ")},
        Paragraph{"Expertise: " + join(p.expertise, ", ")},
        Paragraph{"Personality traits: " + join(p.personality_traits, ", ")},
        Paragraph{"Work style: " + p.work_style},
    };
}

std::optional<std::pair<std::size_t, std::size_t>> find_brace_block(std::string_view text) noexcept
{
    const auto open = text.find('{');
    if (open == std::string_view::npos) {
        return std::nullopt;
    }
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}' && --depth == 0) {
            return std::pair{open, i};
        }
    }
    return std::nullopt;
}

Persona parse_persona_response(std::string_view text)
{
    auto block = find_brace_block(text);
    if (!block) {
        fail(ErrorCode::MalformedPersona, "response contains no {...} block");
    }
    auto body = drop_trailing_commas(text.substr(block->first, block->second - block->first + 1));
    auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        fail(ErrorCode::MalformedPersona, "persona block is not a JSON object");
    }
    Persona p;
    p.name = field_text(parsed, kSchemaKeys[0]);
    p.biography = field_text(parsed, kSchemaKeys[1]);
    p.skills = split_comma_list(field_text(parsed, kSchemaKeys[2]));
    p.expertise = split_comma_list(field_text(parsed, kSchemaKeys[3]));
    p.personality_traits = split_comma_list(field_text(parsed, kSchemaKeys[4]));
    p.work_style = field_text(parsed, kSchemaKeys[5]);
    if (!complete(p)) {
        fail(ErrorCode::MalformedPersona, "persona has an empty field");
    }
    return p;
}

std::string serialize_persona_json(const Persona& p)
{
    // ordered_json keeps schema order
    nlohmann::ordered_json j;
    j["name"] = p.name;
    j["biography"] = p.biography;
    j["skills"] = join(p.skills, ", ");
    j["expertise"] = join(p.expertise, ", ");
    j["personality_traits"] = join(p.personality_traits, ", ");
    j["work_style"] = p.work_style;
    return j.dump(2);
}

} // namespace orchid
