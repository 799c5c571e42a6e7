#include "orchid/json_codec.hpp"

#include "orchid/error.hpp"

namespace orchid::codec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

template <typename Enum, typename Parse>
Enum enum_field(const json& j, const char* key, Parse parse)
{
    const auto text = j.at(key).get<std::string>();
    if (auto value = parse(text)) {
        return *value;
    }
    fail(ErrorCode::ValidationError, std::string("unknown ") + key + " '" + text + "'");
}

template <typename IdT>
json optional_id(const std::optional<IdT>& id)
{
    return id ? json(id->value()) : json(nullptr);
}

template <typename IdT>
std::optional<IdT> optional_id_from(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return IdT(j.at(key).get<std::string>());
}

std::optional<ProfileField> profile_field_from_string(std::string_view name)
{
    if (name == "preferences") {
        return ProfileField::Preferences;
    }
    if (name == "emotional_state") {
        return ProfileField::EmotionalState;
    }
    return std::nullopt;
}

} // namespace

json to_json(const BlockPayload& payload)
{
    json j{{"kind", std::string(to_string(kind_of(payload)))}};
    std::visit(overloaded{
                   [&](const Paragraph& p) { j["text"] = p.text; },
                   [&](const OperationComponent& op) {
                       j["operation"] = std::string(to_string(op.operation));
                       j["prompt"] = op.prompt;
                       j["temperature"] = std::string(to_string(op.temperature));
                   },
                   [&](const ResultBlockRef& r) { j["job"] = r.job.value(); },
                   [&](const GoalComponent& g) {
                       j["objective"] = g.objective;
                       j["temperature"] = std::string(to_string(g.temperature));
                   },
                   [&](const TaskComponent& t) { j["task"] = t.task.value(); },
               },
               payload);
    return j;
}

BlockPayload payload_from_json(const json& j)
{
    switch (enum_field<BlockKind>(j, "kind", block_kind_from_string)) {
    case BlockKind::Paragraph: return Paragraph{j.at("text").get<std::string>()};
    case BlockKind::OperationComponent:
        return OperationComponent{enum_field<OperationKind>(j, "operation", operation_kind_from_string),
                                  j.value("prompt", std::string{}),
                                  j.contains("temperature")
                                      ? enum_field<TemperatureLevel>(j, "temperature", temperature_level_from_string)
                                      : TemperatureLevel::Balanced};
    case BlockKind::ResultBlock: return ResultBlockRef{JobId(j.at("job").get<std::string>())};
    case BlockKind::GoalComponent:
        return GoalComponent{j.at("objective").get<std::string>(),
                             j.contains("temperature")
                                 ? enum_field<TemperatureLevel>(j, "temperature", temperature_level_from_string)
                                 : TemperatureLevel::Balanced};
    case BlockKind::TaskComponent: return TaskComponent{TaskId(j.at("task").get<std::string>())};
    }
    fail(ErrorCode::ValidationError, "unknown block kind");
}

json to_json(const Block& block)
{
    auto j = to_json(block.payload);
    j["id"] = block.id.value();
    j["order"] = block.order;
    return j;
}

Block block_from_json(const json& j)
{
    return Block{BlockId(j.at("id").get<std::string>()), payload_from_json(j), j.at("order").get<std::size_t>()};
}

json to_json(const Document& doc)
{
    json blocks = json::array();
    for (const auto& block : doc.blocks) {
        blocks.push_back(to_json(block));
    }
    return json{
        {"id", doc.id.value()},
        {"kind", std::string(to_string(doc.kind))},
        {"title", doc.title},
        {"blocks", std::move(blocks)},
        {"default_persona", optional_id(doc.default_persona)},
        {"origin_task", optional_id(doc.origin_task)},
        {"revision", doc.revision},
        {"created_ms", doc.created_ms},
        {"updated_ms", doc.updated_ms},
    };
}

Document document_from_json(const json& j)
{
    Document doc;
    doc.id = DocumentId(j.at("id").get<std::string>());
    doc.kind = enum_field<DocumentKind>(j, "kind", document_kind_from_string);
    doc.title = j.at("title").get<std::string>();
    for (const auto& block : j.at("blocks")) {
        doc.blocks.push_back(block_from_json(block));
    }
    doc.default_persona = optional_id_from<DocumentId>(j, "default_persona");
    doc.origin_task = optional_id_from<TaskId>(j, "origin_task");
    doc.revision = j.at("revision").get<Revision>();
    doc.created_ms = j.at("created_ms").get<std::int64_t>();
    doc.updated_ms = j.at("updated_ms").get<std::int64_t>();
    return doc;
}

json to_json(const Task& task)
{
    return json{
        {"id", task.id.value()},
        {"description", task.description},
        {"persona", optional_id(task.persona)},
        {"working_page", optional_id(task.working_page)},
        {"persona_history", task.persona_history},
        {"status", std::string(to_string(task.status))},
    };
}

Task task_from_json(const json& j)
{
    Task task;
    task.id = TaskId(j.at("id").get<std::string>());
    task.description = j.at("description").get<std::string>();
    task.persona = optional_id_from<DocumentId>(j, "persona");
    task.working_page = optional_id_from<DocumentId>(j, "working_page");
    task.persona_history = j.at("persona_history").get<std::vector<std::string>>();
    const auto status = j.at("status").get<std::string>();
    if (status != "Open" && status != "Started") {
        fail(ErrorCode::ValidationError, "unknown task status '" + status + "'");
    }
    task.status = status == "Open" ? TaskStatus::Open : TaskStatus::Started;
    return task;
}

json to_json(const Goal& goal)
{
    json tasks = json::array();
    for (const auto& task : goal.tasks) {
        tasks.push_back(to_json(task));
    }
    return json{{"objective", goal.objective}, {"tasks", std::move(tasks)}};
}

Goal goal_from_json(const json& j)
{
    Goal goal;
    goal.objective = j.at("objective").get<std::string>();
    for (const auto& task : j.at("tasks")) {
        goal.tasks.push_back(task_from_json(task));
    }
    return goal;
}

json to_json(const ProvenanceRecord& record)
{
    json documents = json::array();
    for (const auto& doc : record.documents) {
        documents.push_back(json{{"ref", doc.ref},
                                 {"source", std::string(to_string(doc.source))},
                                 {"title", doc.title},
                                 {"revision", doc.revision}});
    }
    json persona = nullptr;
    if (record.persona) {
        persona = json{{"name", record.persona->name},
                       {"source", std::string(to_string(record.persona->source))},
                       {"id", optional_id(record.persona->id)}};
    }
    json profile = json::array();
    for (auto field : record.profile_fields_included) {
        profile.push_back(std::string(to_string(field)));
    }
    return json{
        {"id", record.id.value()},
        {"job", record.job.value()},
        {"template", std::string(to_string(record.template_id))},
        {"documents", std::move(documents)},
        {"persona", std::move(persona)},
        {"goal_included", record.goal_included},
        {"profile_fields_included", std::move(profile)},
        {"sampling", record.sampling},
        {"created_ms", record.created_ms},
        {"warnings", record.warnings},
        {"params_digest", record.params_digest},
    };
}

ProvenanceRecord provenance_from_json(const json& j)
{
    ProvenanceRecord record;
    record.id = RecordId(j.at("id").get<std::string>());
    record.job = JobId(j.at("job").get<std::string>());
    record.template_id = enum_field<TemplateId>(j, "template", template_id_from_string);
    for (const auto& doc : j.at("documents")) {
        record.documents.push_back(ProvenanceDocument{
            doc.at("ref").get<std::string>(), enum_field<GroundingSource>(doc, "source", grounding_source_from_string),
            doc.at("title").get<std::string>(), doc.at("revision").get<Revision>()});
    }
    if (const auto& persona = j.at("persona"); !persona.is_null()) {
        record.persona = ProvenancePersona{persona.at("name").get<std::string>(),
                                           enum_field<GroundingSource>(persona, "source", grounding_source_from_string),
                                           optional_id_from<DocumentId>(persona, "id")};
    }
    record.goal_included = j.at("goal_included").get<bool>();
    for (const auto& field : j.at("profile_fields_included")) {
        auto parsed = profile_field_from_string(field.get<std::string>());
        if (!parsed) {
            fail(ErrorCode::ValidationError, "unknown profile field");
        }
        record.profile_fields_included.insert(*parsed);
    }
    record.sampling = j.at("sampling").get<double>();
    record.created_ms = j.at("created_ms").get<std::int64_t>();
    record.warnings = j.at("warnings").get<std::vector<std::string>>();
    record.params_digest = j.at("params_digest").get<std::string>();
    return record;
}

json to_json(const Persona& persona)
{
    return json{
        {"name", persona.name},
        {"biography", persona.biography},
        {"skills", persona.skills},
        {"expertise", persona.expertise},
        {"personality_traits", persona.personality_traits},
        {"work_style", persona.work_style},
    };
}

json to_json(const OperationRequest& request)
{
    json selection = nullptr;
    if (request.selection) {
        const auto& s = *request.selection;
        selection = json{{"document", s.document.value()},
                         {"block", s.block.value()},
                         {"start", s.start},
                         {"end", s.end},
                         {"text", s.text}};
    }
    return json{
        {"kind", std::string(to_string(request.kind))},
        {"prompt", request.prompt},
        {"host_page", optional_id(request.host_page)},
        {"selection", std::move(selection)},
        {"temperature", std::string(to_string(request.temperature))},
        {"anchor_block", optional_id(request.anchor_block)},
    };
}

OperationRequest request_from_json(const json& j)
{
    OperationRequest request;
    request.kind = enum_field<OperationKind>(j, "kind", operation_kind_from_string);
    request.prompt = j.value("prompt", std::string{});
    request.host_page = optional_id_from<DocumentId>(j, "host_page");
    if (j.contains("selection") && !j.at("selection").is_null()) {
        const auto& s = j.at("selection");
        request.selection = SelectionRange{DocumentId(s.at("document").get<std::string>()),
                                           BlockId(s.at("block").get<std::string>()), s.at("start").get<std::size_t>(),
                                           s.at("end").get<std::size_t>(), s.at("text").get<std::string>()};
    }
    if (j.contains("temperature")) {
        request.temperature = enum_field<TemperatureLevel>(j, "temperature", temperature_level_from_string);
    }
    request.anchor_block = optional_id_from<BlockId>(j, "anchor_block");
    return request;
}

json to_json(const Job& job)
{
    return json{
        {"id", job.id.value()},
        {"state", std::string(to_string(job.state))},
        {"request", to_json(job.request)},
        {"result", job.result ? json(*job.result) : json(nullptr)},
        {"error", job.error ? json(*job.error) : json(nullptr)},
        {"provenance", job.provenance.value()},
        {"warnings", job.warnings},
        {"result_block", optional_id(job.result_block)},
    };
}

json to_json(const ResultBlock& block)
{
    static constexpr const char* kActions[] = {"Insert", "Regenerate", "Discard"};
    return json{
        {"id", block.id.value()},
        {"job", block.job.value()},
        {"host", block.host.value()},
        {"history", block.history},
        {"status", std::string(to_string(block.status))},
        {"result", block.result ? json(*block.result) : json(nullptr)},
        {"actions", kActions},
    };
}

json to_json(const Mention& mention)
{
    return json{
        {"raw", mention.raw},
        {"target_kind", std::string(to_string(mention.target_kind))},
        {"target", optional_id(mention.target)},
        {"start", mention.start},
        {"end", mention.end},
    };
}

} // namespace orchid::codec
