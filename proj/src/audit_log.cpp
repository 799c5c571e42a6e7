#include "orchid/audit_log.hpp"

#include "orchid/error.hpp"

namespace orchid {

AuditLog::AuditLog(const std::filesystem::path& path) : file_(std::in_place, path, std::ios::app)
{
    if (!*file_) {
        fail(ErrorCode::InvalidConfig, "cannot open audit log " + path.string());
    }
}

void AuditLog::append(nlohmann::json record)
{
    auto line = record.dump();
    std::lock_guard lock(mutex_);
    if (file_) {
        *file_ << line << '\n';
        file_->flush();
    }
    lines_.push_back(std::move(line));
}

std::vector<std::string> AuditLog::lines() const
{
    std::lock_guard lock(mutex_);
    return lines_;
}

std::vector<nlohmann::json> AuditLog::records() const
{
    std::vector<nlohmann::json> out;
    for (const auto& line : lines()) {
        out.push_back(nlohmann::json::parse(line));
    }
    return out;
}

} // namespace orchid
