#pragma once

#include "orchid/ids.hpp"
#include "orchid/operation_kind.hpp"

#include <optional>
#include <string>

namespace orchid {

struct SelectionRange {
    DocumentId document;
    BlockId block;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string text;

    bool operator==(const SelectionRange&) const = default;
};

struct OperationRequest {
    OperationKind kind = OperationKind::Ask;
    std::string prompt;
    std::optional<DocumentId> host_page;
    std::optional<SelectionRange> selection;
    TemperatureLevel temperature = TemperatureLevel::Balanced;
    // Block the result is placed after; defaults to the selection's block
    // for inline prompts, otherwise the result is appended.
    std::optional<BlockId> anchor_block;

    bool operator==(const OperationRequest&) const = default;
};

/// Throws ValidationError when a per-kind invariant is violated.
void validate_request(const OperationRequest& request);

} // namespace orchid
