#include "orchid/archive.hpp"
#include "orchid/config.hpp"
#include "orchid/engine.hpp"
#include "orchid/error.hpp"
#include "orchid/json_codec.hpp"
#include "orchid/mentions.hpp"
#include "orchid/prompt_assembler.hpp"
#include "orchid/service.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

namespace py = pybind11;
using nlohmann::json;
using namespace orchid;

namespace {

// JSON crosses the boundary as text; the Python package decodes it.
std::string dump(const json& j) { return j.dump(); }

TemplateId template_named(const std::string& name)
{
    auto id = template_id_from_string(name);
    if (!id) {
        fail(ErrorCode::ValidationError, "unknown template '" + name + "'");
    }
    return *id;
}

TemperatureLevel level_named(const std::string& name)
{
    auto level = temperature_level_from_string(name);
    if (!level) {
        fail(ErrorCode::ValidationError, "unknown temperature '" + name + "'");
    }
    return *level;
}

ResultAction action_named(const std::string& name)
{
    auto action = result_action_from_string(name);
    if (!action) {
        fail(ErrorCode::ValidationError, "unknown action '" + name + "'");
    }
    return *action;
}

DocumentKind kind_named(const std::string& name)
{
    auto kind = document_kind_from_string(name);
    if (!kind) {
        fail(ErrorCode::ValidationError, "unknown kind '" + name + "'");
    }
    return *kind;
}

/// One in-process workspace driven by the scripted provider.
class PyWorkspace {
public:
    explicit PyWorkspace(std::optional<std::uint64_t> seed)
        : store_(StoreOptions{seed, {}, "Home", "Me"}),
          provider_(std::make_shared<ScriptedProvider>()),
          audit_(std::make_shared<AuditLog>()),
          engine_(std::make_unique<Engine>(store_, provenance_, provider_, EngineConfig{}, audit_))
    {
    }

    ~PyWorkspace() { engine_->shutdown(std::chrono::milliseconds(0)); }

    std::string home_id() const { return store_.home_id().value(); }
    std::string me_id() const { return store_.me_id().value(); }

    std::string create_document(const std::string& kind, const std::string& title, const std::string& blocks,
                                std::optional<std::string> default_persona)
    {
        std::vector<BlockPayload> payloads;
        for (const auto& item : json::parse(blocks)) {
            payloads.push_back(codec::payload_from_json(item));
        }
        DocumentLinks links;
        if (default_persona) {
            links.default_persona = DocumentId(*default_persona);
        }
        return dump(codec::to_json(store_.create_document(kind_named(kind), title, std::move(payloads), links)));
    }

    std::string get_document(const std::string& id) const
    {
        return dump(codec::to_json(store_.get_document(DocumentId(id))));
    }

    std::string list_documents(std::optional<std::string> kind, const std::string& title_prefix) const
    {
        DocumentFilter filter;
        if (kind) {
            filter.kind = kind_named(*kind);
        }
        filter.title_prefix = title_prefix;
        json out = json::array();
        for (const auto& doc : store_.query_documents(filter)) {
            out.push_back(codec::to_json(doc));
        }
        return dump(out);
    }

    std::string append_paragraph(const std::string& id, std::uint64_t revision, const std::string& text)
    {
        const std::vector<BlockEdit> edits{edit::Append{Paragraph{text}, std::nullopt}};
        return dump(codec::to_json(store_.update_document(DocumentId(id), revision, edits)));
    }

    void delete_document(const std::string& id) { store_.delete_document(DocumentId(id)); }

    std::string submit(const std::string& request)
    {
        const auto submission = engine_->submit_operation(codec::request_from_json(json::parse(request)));
        return dump(json{{"job", submission.job.value()},
                         {"result_block", submission.result_block ? json(submission.result_block->value()) : json()}});
    }

    std::string resolve(const std::string& request) const
    {
        return dump(codec::to_json(engine_->preview_grounding(codec::request_from_json(json::parse(request)))));
    }

    std::string poll(const std::string& job) const { return dump(codec::to_json(engine_->poll_job(JobId(job)))); }

    std::string wait(const std::string& job, double timeout_s) const
    {
        py::gil_scoped_release release;
        const auto timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_s * 1000));
        return dump(codec::to_json(engine_->wait_job(JobId(job), timeout)));
    }

    std::string cancel(const std::string& job) { return dump(codec::to_json(engine_->cancel_job(JobId(job)))); }

    std::string block_action(const std::string& block, const std::string& action)
    {
        return dump(codec::to_json(engine_->apply_result_action(BlockId(block), action_named(action))));
    }

    std::string provenance(const std::string& job) const
    {
        return dump(codec::to_json(engine_->get_provenance(JobId(job))));
    }

    std::string execute_goal(const std::string& objective, const std::string& temperature)
    {
        py::gil_scoped_release release;
        const auto result = engine_->execute_goal(objective, level_named(temperature));
        json tasks = json::array();
        for (const auto& task : result.tasks) {
            tasks.push_back(codec::to_json(task));
        }
        return dump(json{{"job", result.job.value()}, {"tasks", tasks}, {"warnings", result.warnings}});
    }

    std::string start_task(const std::string& task) { return dump(codec::to_json(engine_->start_task(TaskId(task)))); }

    std::string generate_task_persona(const std::string& task)
    {
        py::gil_scoped_release release;
        return dump(codec::to_json(engine_->generate_task_persona(TaskId(task))));
    }

    std::string do_task(const std::string& task, const std::string& temperature)
    {
        const auto submission = engine_->do_task(TaskId(task), level_named(temperature));
        return dump(json{{"job", submission.job.value()},
                         {"result_block", submission.result_block ? json(submission.result_block->value()) : json()}});
    }

    void set_response(const std::string& template_name, const std::string& response, const std::string& digest)
    {
        provider_->set_response(template_named(template_name), digest, response);
    }

    void stall() { provider_->stall(); }
    void release() { provider_->release(); }
    std::size_t provider_calls() const { return provider_->calls().size(); }

    std::string export_archive() const { return write_archive(ArchiveContents{store_.snapshot(), provenance_.all()}); }

    void import_archive(const std::string& bytes)
    {
        if (engine_->active_jobs() != 0) {
            fail(ErrorCode::InvalidState, "cannot import while jobs are running");
        }
        auto contents = read_archive(bytes);
        store_.replace(std::move(contents.workspace));
        provenance_.restore(std::move(contents.provenance));
    }

    std::vector<std::string> audit_lines() const { return audit_->lines(); }

private:
    DocumentStore store_;
    ProvenanceStore provenance_;
    std::shared_ptr<ScriptedProvider> provider_;
    std::shared_ptr<AuditLog> audit_;
    std::unique_ptr<Engine> engine_;
};

class PyServer {
public:
    PyServer(const std::string& data_dir, const std::string& host, int port)
    {
        SettingMap flags{{"data_dir", data_dir}, {"host", host}, {"port", std::to_string(port)}};
        service_ = Service::start(load_config({}, flags));
    }

    int port() const { return service_->port(); }

    void shutdown(double drain_s)
    {
        py::gil_scoped_release release;
        service_->shutdown(std::chrono::milliseconds(static_cast<std::int64_t>(drain_s * 1000)));
    }

private:
    std::unique_ptr<Service> service_;
};

} // namespace

PYBIND11_MODULE(_orchid, m)
{
    m.doc() = "Bindings for the orchid context-orchestration core";
    m.attr("__version__") = std::string(kVersion);

    static py::exception<Error> error_type(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            py::object args = py::make_tuple(std::string(to_string(e.code())), std::string(e.what()));
            PyErr_SetObject(error_type.ptr(), args.ptr());
        } catch (const json::exception& e) {
            py::object args = py::make_tuple(std::string("ValidationError"), std::string(e.what()));
            PyErr_SetObject(error_type.ptr(), args.ptr());
        }
    });

    m.def("template_names", [] {
        std::vector<std::string> out;
        for (auto id : kAllTemplates) {
            out.emplace_back(to_string(id));
        }
        return out;
    });
    m.def("template_text", [](const std::string& name) { return std::string(template_text(template_named(name))); });
    m.def("template_placeholders", [](const std::string& name) { return template_placeholders(template_named(name)); });
    m.def("render", [](const std::string& name, const ParameterMap& params) {
        const auto prompt = render_meta_prompt(template_named(name), params);
        return py::make_tuple(prompt.text, prompt.params_digest);
    }, py::arg("template"), py::arg("params"));
    m.def("escape_value", [](const std::string& value) { return escape_value(value); });

    m.def("parse_mentions", [](const std::string& text, const std::vector<std::tuple<std::string, std::string, bool>>& names) {
        NameRegistry registry;
        for (const auto& [name, id, persona] : names) {
            registry.add(name, DocumentId(id), persona);
        }
        json out = json::array();
        for (const auto& mention : parse_mentions(text, registry)) {
            auto j = codec::to_json(mention);
            j["start"] = mention.start;
            j["end"] = mention.end;
            out.push_back(std::move(j));
        }
        return dump(out);
    }, py::arg("text"), py::arg("names"));

    m.def("check_archive", [](const std::string& bytes) {
        const auto contents = read_archive(bytes);
        return py::make_tuple(contents.workspace.documents.size(), contents.provenance.size());
    });

    py::class_<PyWorkspace>(m, "Workspace")
        .def(py::init<std::optional<std::uint64_t>>(), py::arg("seed") = py::none())
        .def("home_id", &PyWorkspace::home_id)
        .def("me_id", &PyWorkspace::me_id)
        .def("create_document", &PyWorkspace::create_document, py::arg("kind"), py::arg("title"),
             py::arg("blocks") = "[]", py::arg("default_persona") = py::none())
        .def("get_document", &PyWorkspace::get_document)
        .def("list_documents", &PyWorkspace::list_documents, py::arg("kind") = py::none(), py::arg("title_prefix") = "")
        .def("append_paragraph", &PyWorkspace::append_paragraph)
        .def("delete_document", &PyWorkspace::delete_document)
        .def("submit", &PyWorkspace::submit)
        .def("resolve", &PyWorkspace::resolve)
        .def("poll", &PyWorkspace::poll)
        .def("wait", &PyWorkspace::wait, py::arg("job"), py::arg("timeout") = 5.0)
        .def("cancel", &PyWorkspace::cancel)
        .def("block_action", &PyWorkspace::block_action)
        .def("provenance", &PyWorkspace::provenance)
        .def("execute_goal", &PyWorkspace::execute_goal, py::arg("objective"), py::arg("temperature") = "Balanced")
        .def("start_task", &PyWorkspace::start_task)
        .def("generate_task_persona", &PyWorkspace::generate_task_persona)
        .def("do_task", &PyWorkspace::do_task, py::arg("task"), py::arg("temperature") = "Balanced")
        .def("set_response", &PyWorkspace::set_response, py::arg("template"), py::arg("response"),
             py::arg("digest") = "*")
        .def("stall", &PyWorkspace::stall)
        .def("release", &PyWorkspace::release)
        .def("provider_calls", &PyWorkspace::provider_calls)
        .def("export_archive", &PyWorkspace::export_archive)
        .def("import_archive", &PyWorkspace::import_archive)
        .def("audit_lines", &PyWorkspace::audit_lines);

    py::class_<PyServer>(m, "Server")
        .def(py::init<const std::string&, const std::string&, int>(), py::arg("data_dir"),
             py::arg("host") = "127.0.0.1", py::arg("port") = 0)
        .def_property_readonly("port", &PyServer::port)
        .def("shutdown", &PyServer::shutdown, py::arg("drain") = 1.0);
}
