#pragma once

#include "orchid/document.hpp"
#include "orchid/engine.hpp"
#include "orchid/operation.hpp"
#include "orchid/provenance.hpp"

#include <json.hpp>

namespace orchid::codec {

using nlohmann::json;

json to_json(const BlockPayload& payload);
BlockPayload payload_from_json(const json& j);

json to_json(const Block& block);
Block block_from_json(const json& j);

json to_json(const Document& doc);
Document document_from_json(const json& j);

json to_json(const Task& task);
Task task_from_json(const json& j);

json to_json(const Goal& goal);
Goal goal_from_json(const json& j);

json to_json(const ProvenanceRecord& record);
ProvenanceRecord provenance_from_json(const json& j);

json to_json(const Persona& persona);

json to_json(const OperationRequest& request);
OperationRequest request_from_json(const json& j);

json to_json(const Job& job);
json to_json(const ResultBlock& block);
json to_json(const Mention& mention);

} // namespace orchid::codec
