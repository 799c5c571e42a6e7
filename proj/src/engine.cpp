#include "orchid/engine.hpp"

#include "orchid/error.hpp"
#include "orchid/labeled_sections.hpp"

#include <algorithm>
#include <array>
#include <chrono>

namespace orchid {

namespace {

constexpr int kEditRetries = 16;

std::int64_t now_ms()
{
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

} // namespace

std::string_view to_string(JobState state) noexcept
{
    switch (state) {
    case JobState::Pending: return "Pending";
    case JobState::Running: return "Running";
    case JobState::Complete: return "Complete";
    case JobState::Failed: return "Failed";
    case JobState::Cancelled: return "Cancelled";
    }
    return "?";
}

bool is_terminal(JobState state) noexcept
{
    return state == JobState::Complete || state == JobState::Failed || state == JobState::Cancelled;
}

bool is_allowed_transition(JobState from, JobState to) noexcept
{
    switch (from) {
    case JobState::Pending: return to == JobState::Running || to == JobState::Cancelled;
    case JobState::Running:
        return to == JobState::Complete || to == JobState::Failed || to == JobState::Cancelled;
    default: return false;
    }
}

std::string_view to_string(ResultAction action) noexcept
{
    switch (action) {
    case ResultAction::Insert: return "Insert";
    case ResultAction::Regenerate: return "Regenerate";
    case ResultAction::Discard: return "Discard";
    }
    return "?";
}

std::optional<ResultAction> result_action_from_string(std::string_view name) noexcept
{
    for (auto action : {ResultAction::Insert, ResultAction::Regenerate, ResultAction::Discard}) {
        if (to_string(action) == name) {
            return action;
        }
    }
    return std::nullopt;
}

double TemperatureTable::at(TemperatureLevel level) const
{
    auto it = values.find(level);
    if (it == values.end()) {
        fail(ErrorCode::InvalidConfig, "temperature table has no " + std::string(to_string(level)) + " entry");
    }
    return it->second;
}

Engine::Engine(DocumentStore& store, ProvenanceStore& provenance, std::shared_ptr<Provider> provider,
               EngineConfig config, std::shared_ptr<AuditLog> audit)
    : store_(store),
      provenance_(provenance),
      provider_(std::move(provider)),
      config_(std::move(config)),
      audit_(audit ? std::move(audit) : std::make_shared<AuditLog>()),
      ids_(std::random_device{}())
{
    const auto workers = std::max<std::size_t>(1, config_.max_concurrent_jobs);
    for (std::size_t i = 0; i < workers; ++i) {
        workers_.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
    }
}

Engine::~Engine() { shutdown(std::chrono::milliseconds(0)); }

void Engine::require_open() const
{
    std::lock_guard lock(mutex_);
    if (!accepting_) {
        fail(ErrorCode::InvalidState, "engine is shutting down");
    }
}

Engine::Prepared Engine::prepare(const OperationRequest& request, const Workspace& workspace,
                                 const std::optional<Task>& task) const
{
    Prepared out;
    out.bundle = resolve_grounding(request, workspace);
    if (task && task->persona && request.kind == OperationKind::DoTask) {
        const auto* page = workspace.find(*task->persona);
        if (page != nullptr && page->kind == DocumentKind::Persona) {
            if (auto persona = parse_persona_page(page->body_text())) {
                out.bundle.persona = BundlePersona{page->id, *persona, GroundingSource::DefaultPersona};
            }
        }
    }
    if (request.kind == OperationKind::GeneratePersona) {
        // the template has no persona slot; a mentioned one would only mislead the lens
        out.bundle.persona.reset();
    }
    out.template_id = select_template(request.kind, out.bundle.persona.has_value());
    auto params = serialize_bundle(out.bundle, request);
    if (request.kind == OperationKind::GeneratePersona) {
        params["exception"] = escape_value(task ? join(task->persona_history, ", ") : std::string{});
    }
    out.prompt = render_meta_prompt(out.template_id, params);
    out.sampling = config_.temperatures.at(request.temperature);
    return out;
}

Document Engine::edit_with_retry(const DocumentId& id,
                                 const std::function<std::vector<BlockEdit>(const Document&)>& make_edits)
{
    for (int attempt = 0;; ++attempt) {
        const auto doc = store_.get_document(id);
        const auto edits = make_edits(doc);
        try {
            return store_.update_document(id, doc.revision, edits);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RevisionConflict || attempt + 1 >= kEditRetries) {
                throw;
            }
        }
    }
}

std::optional<BlockId> Engine::place_result_block(const OperationRequest& request, const JobId& job)
{
    std::optional<DocumentId> host = request.host_page;
    std::optional<BlockId> anchor = request.anchor_block;
    if (request.kind == OperationKind::InlinePrompt) {
        host = request.selection->document;
        if (!anchor) {
            anchor = request.selection->block;
        }
    }
    if (!host || !store_.find_document(*host)) {
        return std::nullopt;
    }
    const auto id = store_.new_block_id();
    edit_with_retry(*host, [&](const Document& doc) {
        std::size_t position = doc.blocks.size();
        if (anchor) {
            if (const auto* block = doc.find_block(*anchor)) {
                position = block->order + 1;
            }
        }
        return std::vector<BlockEdit>{edit::Insert{position, ResultBlockRef{job}, id}};
    });
    return id;
}

Submission Engine::submit_prepared(const OperationRequest& request, const Prepared& prepared, bool place_block,
                                   std::optional<BlockId> reuse)
{
    const JobId job_id(ids_.next("job"));
    std::optional<BlockId> block = reuse;
    if (place_block && !reuse) {
        block = place_result_block(request, job_id);
    }
    DocumentId host;
    {
        std::lock_guard lock(mutex_);
        if (!accepting_) {
            fail(ErrorCode::InvalidState, "engine is shutting down");
        }
        if (reuse) {
            auto it = blocks_.find(*reuse);
            if (it == blocks_.end()) {
                fail(ErrorCode::NotFound, "no result block " + reuse->value());
            }
            const auto& current = jobs_.at(it->second.job).job;
            if (current.state != JobState::Complete) {
                fail(ErrorCode::InvalidState, "regenerate needs a complete result");
            }
            it->second.history.push_back(current.result.value_or(""));
            it->second.job = job_id;
            it->second.status = JobState::Pending;
            it->second.result.reset();
            host = it->second.host;
        }
        const auto record = provenance_.record_provenance(job_id, prepared.bundle, prepared.prompt, prepared.sampling);
        JobEntry entry;
        entry.job = Job{job_id, request, JobState::Pending, std::nullopt, std::nullopt, record.id,
                        prepared.bundle.warnings, block};
        entry.prompt = prepared.prompt;
        entry.sampling = prepared.sampling;
        jobs_.emplace(job_id, std::move(entry));
        if (block && !reuse) {
            const auto& doc_host = request.kind == OperationKind::InlinePrompt ? request.selection->document
                                                                               : *request.host_page;
            blocks_[*block] = ResultBlock{*block, job_id, doc_host, {}, JobState::Pending, std::nullopt};
        }
        audit_->append({{"ts", now_ms()},
                        {"event", "submitted"},
                        {"job", job_id.value()},
                        {"kind", std::string(to_string(request.kind))},
                        {"template", std::string(to_string(prepared.template_id))},
                        {"provenance", record.id.value()}});
        queue_.push_back(job_id);
    }
    queue_ready_.notify_one();
    changed_.notify_all();
    if (reuse) {
        edit_with_retry(host, [&](const Document&) {
            return std::vector<BlockEdit>{edit::Replace{*reuse, ResultBlockRef{job_id}}};
        });
    }
    return Submission{job_id, block};
}

Submission Engine::submit_operation(const OperationRequest& request)
{
    require_open();
    validate_request(request);
    if (!is_menu_operation(request.kind) && request.kind != OperationKind::InlinePrompt) {
        fail(ErrorCode::ValidationError,
             std::string(to_string(request.kind)) + " runs through the goal and task operations");
    }
    const auto workspace = store_.snapshot();
    const auto prepared = prepare(request, workspace, std::nullopt);
    return submit_prepared(request, prepared, true);
}

void Engine::transition(JobEntry& entry, JobState to)
{
    const auto from = entry.job.state;
    if (!is_allowed_transition(from, to)) {
        throw std::logic_error("forbidden job transition " + std::string(to_string(from)) + " -> " +
                               std::string(to_string(to)));
    }
    entry.job.state = to;
    if (entry.job.result_block) {
        if (auto it = blocks_.find(*entry.job.result_block); it != blocks_.end() && it->second.job == entry.job.id) {
            it->second.status = to;
            it->second.result = entry.job.result;
        }
    }
    audit_->append({{"ts", now_ms()},
                    {"event", "transition"},
                    {"job", entry.job.id.value()},
                    {"from", std::string(to_string(from))},
                    {"to", std::string(to_string(to))}});
}

void Engine::worker_loop(std::stop_token stop)
{
    while (true) {
        JobId id;
        MetaPrompt prompt;
        CompletionParams params;
        std::stop_token job_stop;
        {
            std::unique_lock lock(mutex_);
            if (!queue_ready_.wait(lock, stop, [&] { return !queue_.empty(); })) {
                return;
            }
            id = queue_.front();
            queue_.pop_front();
            auto& entry = jobs_.at(id);
            if (entry.job.state != JobState::Pending) {
                continue; // cancelled while queued
            }
            transition(entry, JobState::Running);
            prompt = entry.prompt;
            params.temperature = entry.sampling;
            params.max_output_tokens = config_.max_output_tokens;
            params.timeout = config_.job_timeout;
            job_stop = entry.stop.get_token();
        }
        changed_.notify_all();

        std::optional<std::string> text;
        std::string error;
        try {
            text = provider_->complete(prompt, params, job_stop);
        } catch (const Error& e) {
            error = std::string(to_string(e.code())) + ": " + e.what();
        } catch (const std::exception& e) {
            error = std::string("ProviderError: ") + e.what();
        }

        {
            std::lock_guard lock(mutex_);
            auto& entry = jobs_.at(id);
            if (entry.job.state == JobState::Running) {
                if (text) {
                    entry.job.result = std::move(text);
                    transition(entry, JobState::Complete);
                } else {
                    entry.job.error = error;
                    transition(entry, JobState::Failed);
                }
            }
        }
        changed_.notify_all();
    }
}

Job Engine::poll_job(const JobId& id) const
{
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) {
        fail(ErrorCode::NotFound, "no job " + id.value());
    }
    return it->second.job;
}

Job Engine::cancel_job(const JobId& id)
{
    Job snapshot;
    {
        std::lock_guard lock(mutex_);
        auto it = jobs_.find(id);
        if (it == jobs_.end()) {
            fail(ErrorCode::NotFound, "no job " + id.value());
        }
        auto& entry = it->second;
        if (!is_terminal(entry.job.state)) {
            entry.stop.request_stop();
            transition(entry, JobState::Cancelled);
        }
        snapshot = entry.job;
    }
    changed_.notify_all();
    return snapshot;
}

Job Engine::wait_job(const JobId& id, std::chrono::milliseconds timeout) const
{
    std::unique_lock lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) {
        fail(ErrorCode::NotFound, "no job " + id.value());
    }
    changed_.wait_for(lock, timeout, [&] { return is_terminal(it->second.job.state); });
    return it->second.job;
}

std::vector<Job> Engine::jobs() const
{
    std::lock_guard lock(mutex_);
    std::vector<Job> out;
    for (const auto& [id, entry] : jobs_) {
        out.push_back(entry.job);
    }
    return out;
}

std::size_t Engine::active_jobs() const
{
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count_if(jobs_.begin(), jobs_.end(), [](const auto& item) {
        return !is_terminal(item.second.job.state);
    }));
}

ResultBlock Engine::result_block(const BlockId& id) const
{
    std::lock_guard lock(mutex_);
    auto it = blocks_.find(id);
    if (it == blocks_.end()) {
        fail(ErrorCode::NotFound, "no result block " + id.value());
    }
    return it->second;
}

ResultBlock Engine::apply_result_action(const BlockId& id, ResultAction action)
{
    const auto block = result_block(id);
    switch (action) {
    case ResultAction::Insert: {
        if (block.status != JobState::Complete) {
            fail(ErrorCode::InvalidState, "insert needs a complete result");
        }
        edit_with_retry(block.host, [&](const Document& doc) {
            const auto* placed = doc.find_block(id);
            if (placed == nullptr) {
                fail(ErrorCode::NotFound, "result block is no longer on its page");
            }
            return std::vector<BlockEdit>{edit::Insert{placed->order + 1, Paragraph{block.result.value_or("")}, {}}};
        });
        audit_->append({{"ts", now_ms()}, {"event", "insert"}, {"block", id.value()}, {"job", block.job.value()}});
        return result_block(id);
    }
    case ResultAction::Regenerate: {
        if (block.status != JobState::Complete) {
            fail(ErrorCode::InvalidState, "regenerate needs a complete result");
        }
        const auto request = poll_job(block.job).request;
        std::optional<Task> task;
        if (request.kind == OperationKind::DoTask) {
            if (auto doc = store_.find_document(block.host); doc && doc->origin_task) {
                task = store_.find_task(*doc->origin_task);
            }
        }
        const auto prepared = prepare(request, store_.snapshot(), task);
        submit_prepared(request, prepared, false, id);
        return result_block(id);
    }
    case ResultAction::Discard: {
        ResultBlock removed;
        {
            std::lock_guard lock(mutex_);
            auto it = blocks_.find(id);
            if (it == blocks_.end()) {
                fail(ErrorCode::NotFound, "no result block " + id.value());
            }
            removed = it->second;
            auto& entry = jobs_.at(removed.job);
            if (!is_terminal(entry.job.state)) {
                entry.stop.request_stop();
                transition(entry, JobState::Cancelled);
                removed.status = JobState::Cancelled;
            }
            blocks_.erase(it);
            audit_->append({{"ts", now_ms()},
                            {"event", "discard"},
                            {"block", id.value()},
                            {"job", removed.job.value()},
                            {"history", removed.history},
                            {"result", removed.result ? nlohmann::json(*removed.result) : nlohmann::json(nullptr)}});
        }
        changed_.notify_all();
        try {
            edit_with_retry(removed.host, [&](const Document& doc) {
                if (doc.find_block(id) == nullptr) {
                    return std::vector<BlockEdit>{};
                }
                return std::vector<BlockEdit>{edit::Remove{id}};
            });
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotFound) {
                throw;
            }
        }
        return removed;
    }
    }
    fail(ErrorCode::ValidationError, "unknown result action");
}

ProvenanceRecord Engine::preview_grounding(const OperationRequest& request) const
{
    validate_request(request);
    const auto prepared = prepare(request, store_.snapshot(), std::nullopt);
    return describe_grounding(prepared.bundle, prepared.prompt, prepared.sampling);
}

Job Engine::run_blocking(const OperationRequest& request, Prepared prepared)
{
    const auto submission = submit_prepared(request, prepared, false);
    // the provider enforces job_timeout; the margin covers queueing behind other jobs
    auto job = wait_job(submission.job, config_.job_timeout * 2 + std::chrono::seconds(1));
    if (!is_terminal(job.state)) {
        job = cancel_job(submission.job);
    }
    if (job.state != JobState::Complete) {
        fail(ErrorCode::ProviderError, job.error.value_or("job " + std::string(to_string(job.state))));
    }
    return job;
}

GoalResult Engine::execute_goal(const std::string& objective, TemperatureLevel temperature)
{
    if (trim(objective).empty()) {
        fail(ErrorCode::EmptyObjective, "objective must not be empty");
    }
    require_open();
    OperationRequest request;
    request.kind = OperationKind::ExecuteGoal;
    request.prompt = objective;
    request.host_page = store_.home_id();
    request.temperature = temperature;
    auto job = run_blocking(request, prepare(request, store_.snapshot(), std::nullopt));

    auto plan = parse_todo_response(job.result.value_or(""));
    {
        std::lock_guard lock(mutex_);
        auto& warnings = jobs_.at(job.id).job.warnings;
        warnings.insert(warnings.end(), plan.warnings.begin(), plan.warnings.end());
    }

    GoalResult result;
    result.job = job.id;
    result.warnings = plan.warnings;
    Goal goal;
    goal.objective = objective;
    if (auto previous = store_.goal()) {
        for (auto& task : previous->tasks) {
            if (task.status == TaskStatus::Started) {
                goal.tasks.push_back(std::move(task));
            }
        }
    }
    for (auto& description : plan.tasks) {
        Task task;
        task.id = store_.new_task_id();
        task.description = std::move(description);
        result.tasks.push_back(task);
        goal.tasks.push_back(std::move(task));
    }
    store_.set_goal(goal);

    edit_with_retry(store_.home_id(), [&](const Document& home) {
        std::vector<BlockEdit> edits;
        for (const auto& block : home.blocks) {
            if (std::holds_alternative<GoalComponent>(block.payload)) {
                edits.push_back(edit::Remove{block.id});
            } else if (const auto* component = std::get_if<TaskComponent>(&block.payload)) {
                if (goal.find_task(component->task) == nullptr) {
                    edits.push_back(edit::Remove{block.id});
                }
            }
        }
        edits.push_back(edit::Insert{0, GoalComponent{objective, temperature}, {}});
        for (const auto& task : result.tasks) {
            edits.push_back(edit::Append{TaskComponent{task.id}, {}});
        }
        return edits;
    });
    return result;
}

Document Engine::start_task(const TaskId& id)
{
    auto task = store_.find_task(id);
    if (!task) {
        fail(ErrorCode::NotFound, "no task " + id.value());
    }
    if (task->status == TaskStatus::Started) {
        fail(ErrorCode::AlreadyStarted, "task " + id.value() + " is already started");
    }
    DocumentLinks links;
    links.origin_task = id;
    if (task->persona && store_.find_document(*task->persona)) {
        links.default_persona = task->persona;
    }
    auto title = trim(task->description);
    auto page = store_.create_document(DocumentKind::Workbook, title.empty() ? "Task" : title, {}, links);
    try {
        store_.update_task(id, [&](Task& t) {
            if (t.status == TaskStatus::Started) {
                fail(ErrorCode::AlreadyStarted, "task " + id.value() + " is already started");
            }
            t.status = TaskStatus::Started;
            t.working_page = page.id;
        });
    } catch (...) {
        store_.delete_document(page.id);
        throw;
    }
    return page;
}

Document Engine::generate_task_persona(const TaskId& id)
{
    auto task = store_.find_task(id);
    if (!task) {
        fail(ErrorCode::NotFound, "no task " + id.value());
    }
    require_open();
    OperationRequest request;
    request.kind = OperationKind::GeneratePersona;
    request.prompt = task->description;
    request.host_page = store_.home_id();
    request.temperature = TemperatureLevel::Creative;

    std::optional<Persona> persona;
    for (int attempt = 0; attempt < 2 && !persona; ++attempt) {
        // identical prompt on retry: same workspace state, same task
        auto job = run_blocking(request, prepare(request, store_.snapshot(), task));
        try {
            persona = parse_persona_response(job.result.value_or(""));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MalformedPersona || attempt == 1) {
                throw;
            }
        }
    }

    std::optional<Document> page;
    for (const auto& existing : store_.query_documents({DocumentKind::Persona, persona->name})) {
        if (existing.title == persona->name) {
            page = existing;
            break;
        }
    }
    const auto blocks = persona_page_blocks(*persona);
    if (page) {
        page = edit_with_retry(page->id, [&](const Document& doc) {
            std::vector<BlockEdit> edits;
            for (const auto& block : doc.blocks) {
                edits.push_back(edit::Remove{block.id});
            }
            for (const auto& payload : blocks) {
                edits.push_back(edit::Append{payload, {}});
            }
            return edits;
        });
    } else {
        page = store_.create_document(DocumentKind::Persona, persona->name, blocks);
    }
    store_.update_task(id, [&](Task& t) {
        t.persona = page->id;
        t.persona_history.push_back(persona->name);
    });
    return *page;
}

Submission Engine::do_task(const TaskId& id, TemperatureLevel temperature)
{
    auto task = store_.find_task(id);
    if (!task) {
        fail(ErrorCode::NotFound, "no task " + id.value());
    }
    if (task->status != TaskStatus::Started || !task->working_page) {
        fail(ErrorCode::NotStarted, "task " + id.value() + " has not been started");
    }
    require_open();
    OperationRequest request;
    request.kind = OperationKind::DoTask;
    request.prompt = task->description;
    request.host_page = task->working_page;
    request.temperature = temperature;
    const auto prepared = prepare(request, store_.snapshot(), task);
    return submit_prepared(request, prepared, true);
}

ProvenanceRecord Engine::get_provenance(const JobId& job) const { return provenance_.get(job); }

ProvenanceRecord Engine::get_block_provenance(const BlockId& block) const
{
    std::optional<JobId> job;
    {
        std::lock_guard lock(mutex_);
        if (auto it = blocks_.find(block); it != blocks_.end()) {
            job = it->second.job;
        }
    }
    if (job) {
        return provenance_.get(*job);
    }
    return provenance_.get_for_block(block, store_.snapshot());
}

void Engine::shutdown(std::chrono::milliseconds drain)
{
    {
        std::unique_lock lock(mutex_);
        if (stopped_) {
            return;
        }
        accepting_ = false;
        changed_.wait_for(lock, drain, [&] {
            return std::all_of(jobs_.begin(), jobs_.end(),
                               [](const auto& item) { return is_terminal(item.second.job.state); });
        });
        for (auto& [job_id, entry] : jobs_) {
            if (!is_terminal(entry.job.state)) {
                entry.stop.request_stop();
                transition(entry, JobState::Cancelled);
            }
        }
        stopped_ = true;
    }
    changed_.notify_all();
    for (auto& worker : workers_) {
        worker.request_stop();
    }
    queue_ready_.notify_all();
    workers_.clear();
}

} // namespace orchid
