#include "orchid/provenance.hpp"

#include "orchid/error.hpp"
#include "orchid/json_codec.hpp"

#include <chrono>
#include <mutex>

namespace orchid {

std::string_view to_string(ProfileField field) noexcept
{
    return field == ProfileField::Preferences ? "preferences" : "emotional_state";
}

ProvenanceRecord describe_grounding(const ContextBundle& bundle, const MetaPrompt& prompt, double sampling)
{
    const auto used = template_placeholders(prompt.template_id);
    ProvenanceRecord record;
    record.template_id = prompt.template_id;
    record.sampling = sampling;
    record.params_digest = prompt.params_digest;
    record.warnings = bundle.warnings;
    if (used.contains("context")) {
        for (const auto& doc : bundle.documents) {
            record.documents.push_back(ProvenanceDocument{doc.id ? doc.id->value() : std::string(kSelectionRef),
                                                          doc.source, doc.title, doc.revision});
        }
    }
    if (used.contains("persona") && bundle.persona) {
        record.persona = ProvenancePersona{bundle.persona->persona.name, bundle.persona->source, bundle.persona->id};
    }
    record.goal_included = used.contains("goal") && bundle.goal && !bundle.goal->empty();
    if (bundle.profile) {
        const bool wants_preferences =
            used.contains("preferences") || used.contains("personal_preferences") || used.contains("design_preferences");
        if (wants_preferences && !bundle.profile->personal_preferences.empty()) {
            record.profile_fields_included.insert(ProfileField::Preferences);
        }
        if (used.contains("emotional_state") && !bundle.profile->emotional_state.empty()) {
            record.profile_fields_included.insert(ProfileField::EmotionalState);
        }
    }
    return record;
}

std::string to_text(const ProvenanceRecord& record) { return codec::to_json(record).dump(); }

ProvenanceStore::ProvenanceStore(std::function<std::int64_t()> clock) : clock_(std::move(clock))
{
    if (!clock_) {
        clock_ = [] {
            using namespace std::chrono;
            return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
        };
    }
}

ProvenanceRecord ProvenanceStore::record_provenance(const JobId& job, const ContextBundle& bundle,
                                                    const MetaPrompt& prompt, double sampling)
{
    auto record = describe_grounding(bundle, prompt, sampling);
    record.job = job;
    record.created_ms = clock_();
    std::unique_lock lock(mutex_);
    if (by_job_.contains(job)) {
        fail(ErrorCode::DuplicateRecord, "job " + job.value() + " already has a provenance record");
    }
    record.id = RecordId("prov-" + std::to_string(next_++));
    by_job_.emplace(job, records_.size());
    records_.push_back(record);
    return record;
}

ProvenanceRecord ProvenanceStore::get(const JobId& job) const
{
    if (auto record = find(job)) {
        return *std::move(record);
    }
    fail(ErrorCode::NotFound, "no provenance for job " + job.value());
}

std::optional<ProvenanceRecord> ProvenanceStore::find(const JobId& job) const
{
    std::shared_lock lock(mutex_);
    auto it = by_job_.find(job);
    if (it == by_job_.end()) {
        return std::nullopt;
    }
    return records_[it->second];
}

ProvenanceRecord ProvenanceStore::get_for_block(const BlockId& block, const Workspace& workspace) const
{
    for (const auto& [id, doc] : workspace.documents) {
        if (const auto* found = doc.find_block(block)) {
            if (const auto* ref = std::get_if<ResultBlockRef>(&found->payload)) {
                return get(ref->job);
            }
            fail(ErrorCode::NotFound, "block " + block.value() + " is not a result block");
        }
    }
    fail(ErrorCode::NotFound, "no block " + block.value());
}

std::vector<ProvenanceRecord> ProvenanceStore::all() const
{
    std::shared_lock lock(mutex_);
    return records_;
}

void ProvenanceStore::restore(std::vector<ProvenanceRecord> records)
{
    std::map<JobId, std::size_t> index;
    std::uint64_t next = 1;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!index.emplace(records[i].job, i).second) {
            fail(ErrorCode::DuplicateRecord, "two provenance records for job " + records[i].job.value());
        }
        const auto& id = records[i].id.value();
        if (id.starts_with("prov-")) {
            next = std::max<std::uint64_t>(next, std::strtoull(id.c_str() + 5, nullptr, 10) + 1);
        }
    }
    std::unique_lock lock(mutex_);
    records_ = std::move(records);
    by_job_ = std::move(index);
    next_ = next;
}

std::size_t ProvenanceStore::size() const
{
    std::shared_lock lock(mutex_);
    return records_.size();
}

} // namespace orchid
