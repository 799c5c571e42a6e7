#include "orchid/labeled_sections.hpp"

#include <cctype>
#include <optional>

namespace orchid {

namespace {

char fold(char c)
{
    if (c == '_') {
        return ' ';
    }
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

// Returns the canonical label and the offset just past ':' when `line`
// starts with one of the labels.
std::optional<std::pair<std::string, std::size_t>> match_label(std::string_view line,
                                                               std::span<const std::string_view> labels)
{
    std::size_t lead = 0;
    while (lead < line.size() && (line[lead] == ' ' || line[lead] == '\t')) {
        ++lead;
    }
    for (auto label : labels) {
        if (line.size() < lead + label.size() + 1) {
            continue;
        }
        bool same = true;
        for (std::size_t i = 0; i < label.size() && same; ++i) {
            same = fold(line[lead + i]) == fold(label[i]);
        }
        if (!same) {
            continue;
        }
        std::size_t pos = lead + label.size();
        while (pos < line.size() && line[pos] == ' ') {
            ++pos;
        }
        if (pos < line.size() && line[pos] == ':') {
            return std::pair{std::string(label), pos + 1};
        }
    }
    return std::nullopt;
}

} // namespace

std::string trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

LabeledSections parse_labeled_sections(std::string_view text, std::span<const std::string_view> labels)
{
    LabeledSections out;
    std::optional<std::string> current;
    std::string buffer;

    auto flush = [&] {
        auto value = trim(buffer);
        if (current) {
            auto& slot = out.values[*current];
            slot = slot.empty() ? value : (value.empty() ? slot : slot + "\n" + value);
        } else {
            out.unlabeled = value;
        }
        buffer.clear();
    };

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (auto label = match_label(line, labels)) {
            flush();
            current = label->first;
            buffer = std::string(line.substr(label->second));
        } else {
            if (!buffer.empty() || current) {
                buffer.push_back('\n');
            }
            buffer += line;
        }
        if (nl == std::string_view::npos) {
            break;
        }
        pos = nl + 1;
    }
    flush();
    return out;
}

} // namespace orchid
