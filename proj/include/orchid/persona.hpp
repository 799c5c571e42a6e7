#pragma once

#include "orchid/document.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orchid {

struct Persona {
    std::string name;
    std::string biography;
    std::vector<std::string> skills;
    std::vector<std::string> expertise;
    std::vector<std::string> personality_traits;
    std::string work_style;

    bool operator==(const Persona&) const = default;
};

// Persona pages store their fields as labeled sections:
//   Name: ...
//   Biography: ...
//   Skills: a, b
//   Expertise: ...
//   Personality traits: ...
//   Work style: ...
std::optional<Persona> parse_persona_page(std::string_view body);
std::vector<BlockPayload> persona_page_blocks(const Persona& persona);

/// Extracts the first balanced-brace block of a model response and parses
/// the six-field persona schema from it. Throws MalformedPersona.
Persona parse_persona_response(std::string_view text);

/// JSON object with the six fields in schema order, list fields joined by ", ".
std::string serialize_persona_json(const Persona& persona);

/// Position range [first, last] of the first balanced {...} block, honouring
/// double-quoted strings. nullopt when there is none.
std::optional<std::pair<std::size_t, std::size_t>> find_brace_block(std::string_view text) noexcept;

std::vector<std::string> split_comma_list(std::string_view text);
std::string join(const std::vector<std::string>& items, std::string_view separator);

} // namespace orchid
