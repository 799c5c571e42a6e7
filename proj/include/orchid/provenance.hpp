#pragma once

#include "orchid/context_resolver.hpp"
#include "orchid/prompt_assembler.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace orchid {

inline constexpr std::string_view kSelectionRef = "selection";

struct ProvenanceDocument {
    std::string ref; // document id, or "selection"
    GroundingSource source = GroundingSource::HostPage;
    std::string title;
    Revision revision = 0;

    bool operator==(const ProvenanceDocument&) const = default;
};

struct ProvenancePersona {
    std::string name;
    GroundingSource source = GroundingSource::DefaultPersona;
    std::optional<DocumentId> id;

    bool operator==(const ProvenancePersona&) const = default;
};

enum class ProfileField { Preferences, EmotionalState };

std::string_view to_string(ProfileField field) noexcept;

struct ProvenanceRecord {
    RecordId id;
    JobId job;
    TemplateId template_id = TemplateId::AskNoPersona;
    std::vector<ProvenanceDocument> documents;
    std::optional<ProvenancePersona> persona;
    bool goal_included = false;
    std::set<ProfileField> profile_fields_included;
    double sampling = 0.0;
    std::int64_t created_ms = 0;
    std::vector<std::string> warnings;
    std::string params_digest;

    bool operator==(const ProvenanceRecord&) const = default;
};

/// Describes what the rendered prompt actually consumed from the bundle:
/// documents only when the template has {context}, goal and profile only
/// when it has the matching placeholders and the value is non-empty.
ProvenanceRecord describe_grounding(const ContextBundle& bundle, const MetaPrompt& prompt, double sampling);

/// Stable single-line JSON text.
std::string to_text(const ProvenanceRecord& record);

/// Append-only store of one record per job.
class ProvenanceStore {
public:
    explicit ProvenanceStore(std::function<std::int64_t()> clock = {});

    /// Throws DuplicateRecord if the job already has one.
    ProvenanceRecord record_provenance(const JobId& job, const ContextBundle& bundle, const MetaPrompt& prompt,
                                       double sampling);

    ProvenanceRecord get(const JobId& job) const;
    std::optional<ProvenanceRecord> find(const JobId& job) const;

    /// Resolves a result block through the job its payload points at.
    ProvenanceRecord get_for_block(const BlockId& block, const Workspace& workspace) const;

    std::vector<ProvenanceRecord> all() const;
    void restore(std::vector<ProvenanceRecord> records);
    std::size_t size() const;

private:
    std::function<std::int64_t()> clock_;
    mutable std::shared_mutex mutex_;
    std::vector<ProvenanceRecord> records_;
    std::map<JobId, std::size_t> by_job_;
    std::uint64_t next_ = 1;
};

} // namespace orchid
