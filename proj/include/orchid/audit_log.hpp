#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace orchid {

/// Append-only, line-delimited JSON log. Always kept in memory; mirrored to
/// a file when a path is given.
class AuditLog {
public:
    AuditLog() = default;
    explicit AuditLog(const std::filesystem::path& path);

    void append(nlohmann::json record);
    std::vector<std::string> lines() const;
    std::vector<nlohmann::json> records() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> lines_;
    std::optional<std::ofstream> file_;
};

} // namespace orchid
