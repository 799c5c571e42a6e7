#pragma once

#include "orchid/document.hpp"
#include "orchid/provenance.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace orchid {

inline constexpr std::string_view kArchiveHeader = "ORCHID-WS v1";
inline constexpr int kArchiveVersion = 1;

struct ArchiveContents {
    Workspace workspace;
    std::vector<ProvenanceRecord> provenance;

    bool operator==(const ArchiveContents&) const = default;
};

/// Line-oriented archive: the header line, a workspace line, one JSON line
/// per document (sorted by id) and per provenance record (insertion order),
/// then an "END <n>" trailer counting the JSON lines. See docs/archive_format.md.
std::string write_archive(const ArchiveContents& contents);

/// Throws VersionMismatch for another "ORCHID-WS v<n>" header and
/// MalformedArchive for anything else that does not parse or validate.
ArchiveContents read_archive(std::string_view bytes);

} // namespace orchid
