#pragma once

#include "orchid/audit_log.hpp"
#include "orchid/context_resolver.hpp"
#include "orchid/document_store.hpp"
#include "orchid/prompt_assembler.hpp"
#include "orchid/provenance.hpp"
#include "orchid/provider.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

namespace orchid {

enum class JobState { Pending, Running, Complete, Failed, Cancelled };

std::string_view to_string(JobState state) noexcept;
bool is_terminal(JobState state) noexcept;
/// Pending->Running->{Complete,Failed}, and Pending/Running->Cancelled.
bool is_allowed_transition(JobState from, JobState to) noexcept;

struct Job {
    JobId id;
    OperationRequest request;
    JobState state = JobState::Pending;
    std::optional<std::string> result;
    std::optional<std::string> error;
    RecordId provenance;
    std::vector<std::string> warnings;
    std::optional<BlockId> result_block;
};

struct ResultBlock {
    BlockId id;
    JobId job;
    DocumentId host;
    std::vector<std::string> history;
    JobState status = JobState::Pending;
    std::optional<std::string> result;
};

enum class ResultAction { Insert, Regenerate, Discard };

std::string_view to_string(ResultAction action) noexcept;
std::optional<ResultAction> result_action_from_string(std::string_view name) noexcept;

struct TemperatureTable {
    std::map<TemperatureLevel, double> values{
        {TemperatureLevel::Precise, 0.2},
        {TemperatureLevel::Balanced, 0.7},
        {TemperatureLevel::Creative, 1.0},
    };

    double at(TemperatureLevel level) const;
};

struct EngineConfig {
    TemperatureTable temperatures;
    std::size_t max_concurrent_jobs = 4;
    std::chrono::milliseconds job_timeout{60000};
    std::size_t max_output_tokens = 1024;
};

struct Submission {
    JobId job;
    std::optional<BlockId> result_block;
};

struct GoalResult {
    JobId job;
    std::vector<Task> tasks;
    std::vector<std::string> warnings;
};

/// Runs operations asynchronously against a provider. Submission resolves
/// grounding and records provenance before returning; the provider call
/// happens on a worker thread. Jobs never write to documents; only the
/// result-block actions and the goal/task operations do.
class Engine {
public:
    Engine(DocumentStore& store, ProvenanceStore& provenance, std::shared_ptr<Provider> provider,
           EngineConfig config = {}, std::shared_ptr<AuditLog> audit = nullptr);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    Submission submit_operation(const OperationRequest& request);

    Job poll_job(const JobId& id) const;
    Job cancel_job(const JobId& id);
    /// Blocks until the job is terminal or the timeout elapses; returns the
    /// latest snapshot either way.
    Job wait_job(const JobId& id, std::chrono::milliseconds timeout) const;
    std::vector<Job> jobs() const;

    ResultBlock result_block(const BlockId& id) const;
    ResultBlock apply_result_action(const BlockId& id, ResultAction action);

    /// What a submission would be grounded on, without submitting.
    ProvenanceRecord preview_grounding(const OperationRequest& request) const;

    GoalResult execute_goal(const std::string& objective, TemperatureLevel temperature);
    Document start_task(const TaskId& id);
    Document generate_task_persona(const TaskId& id);
    Submission do_task(const TaskId& id, TemperatureLevel temperature);

    ProvenanceRecord get_provenance(const JobId& job) const;
    ProvenanceRecord get_block_provenance(const BlockId& block) const;

    double map_temperature(TemperatureLevel level) const { return config_.temperatures.at(level); }

    /// Stops accepting work, lets queued and running jobs finish for up to
    /// `drain`, then cancels whatever is left. Idempotent.
    void shutdown(std::chrono::milliseconds drain);

    std::size_t active_jobs() const;

private:
    struct JobEntry {
        Job job;
        MetaPrompt prompt;
        double sampling = 0.0;
        std::stop_source stop;
    };

    struct Prepared {
        ContextBundle bundle;
        TemplateId template_id;
        MetaPrompt prompt;
        double sampling;
    };

    Prepared prepare(const OperationRequest& request, const Workspace& workspace,
                     const std::optional<Task>& task) const;
    // Records provenance and queues the job. With `reuse`, the existing
    // result block is re-pointed at the new job (regenerate).
    Submission submit_prepared(const OperationRequest& request, const Prepared& prepared, bool place_block,
                               std::optional<BlockId> reuse = std::nullopt);
    std::optional<BlockId> place_result_block(const OperationRequest& request, const JobId& job);
    Document edit_with_retry(const DocumentId& id,
                             const std::function<std::vector<BlockEdit>(const Document&)>& make_edits);
    void transition(JobEntry& entry, JobState to); // caller holds mutex_
    void worker_loop(std::stop_token stop);
    Job run_blocking(const OperationRequest& request, Prepared prepared);
    void require_open() const;

    DocumentStore& store_;
    ProvenanceStore& provenance_;
    std::shared_ptr<Provider> provider_;
    EngineConfig config_;
    std::shared_ptr<AuditLog> audit_;
    IdGenerator ids_;

    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::condition_variable_any queue_ready_;
    std::map<JobId, JobEntry> jobs_;
    std::map<BlockId, ResultBlock> blocks_;
    std::deque<JobId> queue_;
    bool accepting_ = true;
    bool stopped_ = false;
    std::vector<std::jthread> workers_;
};

} // namespace orchid
