#include "orchid/archive.hpp"

#include "orchid/error.hpp"
#include "orchid/json_codec.hpp"

#include <charconv>
#include <set>

namespace orchid {

namespace {

constexpr std::string_view kHeaderPrefix = "ORCHID-WS v";
constexpr std::string_view kTrailerPrefix = "END ";

std::vector<std::string_view> split_lines(std::string_view bytes)
{
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        auto nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(bytes.substr(pos));
            break;
        }
        lines.push_back(bytes.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

[[noreturn]] void malformed(const std::string& why) { fail(ErrorCode::MalformedArchive, why); }

nlohmann::json parse_record(std::string_view line, std::string_view expected)
{
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("record", std::string{}) != expected) {
        malformed("expected a " + std::string(expected) + " record");
    }
    return j;
}

} // namespace

std::string write_archive(const ArchiveContents& contents)
{
    std::string out(kArchiveHeader);
    out.push_back('\n');
    nlohmann::json head{
        {"record", "workspace"},
        {"documents", contents.workspace.documents.size()},
        {"provenance", contents.provenance.size()},
        {"goal", contents.workspace.goal ? codec::to_json(*contents.workspace.goal) : nlohmann::json(nullptr)},
    };
    out += head.dump();
    out.push_back('\n');
    for (const auto& [id, doc] : contents.workspace.documents) {
        auto j = codec::to_json(doc);
        j["record"] = "document";
        out += j.dump();
        out.push_back('\n');
    }
    for (const auto& record : contents.provenance) {
        auto j = codec::to_json(record);
        j["record"] = "provenance";
        out += j.dump();
        out.push_back('\n');
    }
    out += std::string(kTrailerPrefix) +
           std::to_string(1 + contents.workspace.documents.size() + contents.provenance.size()) + "\n";
    return out;
}

ArchiveContents read_archive(std::string_view bytes)
{
    const auto lines = split_lines(bytes);
    if (lines.empty() || !lines.front().starts_with(kHeaderPrefix)) {
        malformed("missing ORCHID-WS header");
    }
    const auto version_text = lines.front().substr(kHeaderPrefix.size());
    int version = 0;
    auto [ptr, ec] = std::from_chars(version_text.data(), version_text.data() + version_text.size(), version);
    if (ec != std::errc{} || ptr != version_text.data() + version_text.size()) {
        malformed("unreadable archive version");
    }
    if (version != kArchiveVersion) {
        fail(ErrorCode::VersionMismatch, "archive version " + std::to_string(version) + " is not supported");
    }
    if (bytes.empty() || bytes.back() != '\n') {
        malformed("archive is truncated");
    }

    try {
        if (lines.size() < 3) {
            malformed("archive is truncated");
        }
        const auto head = parse_record(lines[1], "workspace");
        const auto doc_count = head.at("documents").get<std::size_t>();
        const auto prov_count = head.at("provenance").get<std::size_t>();
        const auto expected_lines = 3 + doc_count + prov_count;
        if (lines.size() != expected_lines) {
            malformed("archive has " + std::to_string(lines.size()) + " lines, header promises " +
                      std::to_string(expected_lines));
        }
        if (lines.back() != std::string(kTrailerPrefix) + std::to_string(1 + doc_count + prov_count)) {
            malformed("archive trailer missing or wrong");
        }

        ArchiveContents contents;
        if (!head.at("goal").is_null()) {
            contents.workspace.goal = codec::goal_from_json(head.at("goal"));
        }
        for (std::size_t i = 0; i < doc_count; ++i) {
            auto doc = codec::document_from_json(parse_record(lines[2 + i], "document"));
            auto id = doc.id;
            if (!contents.workspace.documents.emplace(id, std::move(doc)).second) {
                malformed("duplicate document id " + id.value());
            }
        }
        std::set<JobId> jobs;
        for (std::size_t i = 0; i < prov_count; ++i) {
            auto record = codec::provenance_from_json(parse_record(lines[2 + doc_count + i], "provenance"));
            if (!jobs.insert(record.job).second) {
                malformed("duplicate provenance record for job " + record.job.value());
            }
            contents.provenance.push_back(std::move(record));
        }
        if (auto problem = check_invariants(contents.workspace)) {
            malformed(*problem);
        }
        return contents;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedArchive) {
            throw;
        }
        malformed(e.what());
    } catch (const nlohmann::json::exception& e) {
        malformed(e.what());
    }
}

} // namespace orchid
