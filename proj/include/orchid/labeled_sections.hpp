#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

namespace orchid {

struct LabeledSections {
    // keyed by the canonical label as passed in
    std::map<std::string, std::string> values;
    std::string unlabeled;
};

/// Splits "Label: value" text. A label is recognised at the start of a line,
/// case-insensitively, with '_' and ' ' interchangeable, followed by ':'.
/// A value runs until the next label line; text before the first label is
/// collected as unlabeled. Values are trimmed.
LabeledSections parse_labeled_sections(std::string_view text, std::span<const std::string_view> labels);

std::string trim(std::string_view text);

} // namespace orchid
