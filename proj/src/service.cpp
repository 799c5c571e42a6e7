#include "orchid/service.hpp"

#include "orchid/archive.hpp"
#include "orchid/error.hpp"
#include "orchid/json_codec.hpp"

#include <httplib.h>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace orchid {

namespace {

using nlohmann::json;

constexpr const char* kArchiveFile = "workspace.orchid";
constexpr const char* kAuditFile = "audit.log";
constexpr const char* kRequestIdHeader = "X-Request-Id";
constexpr std::size_t kIdempotencyCacheLimit = 4096;

int status_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnknownHostPage: return 404;
    case ErrorCode::DuplicateSingleton:
    case ErrorCode::RevisionConflict:
    case ErrorCode::ProtectedDocument:
    case ErrorCode::AlreadyStarted:
    case ErrorCode::NotStarted:
    case ErrorCode::InvalidState:
    case ErrorCode::DuplicateRecord:
    case ErrorCode::Cancelled: return 409;
    case ErrorCode::ProviderError:
    case ErrorCode::RemoteError:
    case ErrorCode::EmptyPlan:
    case ErrorCode::MalformedPersona: return 502;
    case ErrorCode::Timeout: return 504;
    case ErrorCode::InvalidConfig:
    case ErrorCode::BindError: return 500;
    default: return 400;
    }
}

void send_json(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message)
{
    send_json(res, status, json{{"error", code}, {"message", message}});
}

json parse_body(const httplib::Request& req)
{
    if (req.body.empty()) {
        return json::object();
    }
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        fail(ErrorCode::ValidationError, "request body must be a JSON object");
    }
    return body;
}

TemperatureLevel temperature_of(const json& body, TemperatureLevel fallback)
{
    if (!body.contains("temperature")) {
        return fallback;
    }
    const auto name = body.at("temperature").get<std::string>();
    auto level = temperature_level_from_string(name);
    if (!level) {
        fail(ErrorCode::ValidationError, "unknown temperature '" + name + "'");
    }
    return *level;
}

BlockEdit edit_from_json(const json& j)
{
    const auto op = j.at("op").get<std::string>();
    auto id = [&]() -> std::optional<BlockId> {
        if (j.contains("id") && !j.at("id").is_null()) {
            return BlockId(j.at("id").get<std::string>());
        }
        return std::nullopt;
    };
    if (op == "append") {
        return edit::Append{codec::payload_from_json(j.at("payload")), id()};
    }
    if (op == "insert") {
        return edit::Insert{j.at("position").get<std::size_t>(), codec::payload_from_json(j.at("payload")), id()};
    }
    if (op == "replace") {
        return edit::Replace{BlockId(j.at("block").get<std::string>()), codec::payload_from_json(j.at("payload"))};
    }
    if (op == "remove") {
        return edit::Remove{BlockId(j.at("block").get<std::string>())};
    }
    if (op == "rename") {
        return edit::Rename{j.at("title").get<std::string>()};
    }
    if (op == "set_default_persona") {
        if (!j.contains("persona") || j.at("persona").is_null()) {
            return edit::SetDefaultPersona{std::nullopt};
        }
        return edit::SetDefaultPersona{DocumentId(j.at("persona").get<std::string>())};
    }
    fail(ErrorCode::ValidationError, "unknown edit op '" + op + "'");
}

json documents_json(const std::vector<Document>& docs)
{
    json out = json::array();
    for (const auto& doc : docs) {
        out.push_back(codec::to_json(doc));
    }
    return out;
}

} // namespace

struct Service::Impl {
    Config config;
    DocumentStore store;
    ProvenanceStore provenance;
    std::shared_ptr<Provider> provider;
    std::shared_ptr<AuditLog> audit;
    std::unique_ptr<Engine> engine;
    httplib::Server server;
    std::thread listener;
    int port = 0;

    std::mutex persist_mutex;
    std::mutex idempotency_mutex;
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<int, std::string>> replies;
    std::deque<std::tuple<std::string, std::string, std::string>> reply_order;

    std::mutex lifecycle_mutex;
    std::condition_variable stopped_cv;
    bool stopped = false;

    std::filesystem::path archive_path() const { return config.data_dir / kArchiveFile; }

    void load()
    {
        std::ifstream in(archive_path(), std::ios::binary);
        if (!in) {
            return;
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        auto contents = read_archive(buffer.str());
        store.replace(std::move(contents.workspace));
        provenance.restore(std::move(contents.provenance));
    }

    void persist()
    {
        std::lock_guard lock(persist_mutex);
        const auto bytes = write_archive(ArchiveContents{store.snapshot(), provenance.all()});
        const auto tmp = archive_path().string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << bytes;
            if (!out) {
                fail(ErrorCode::InvalidConfig, "cannot write " + tmp);
            }
        }
        std::filesystem::rename(tmp, archive_path());
    }

    using Handler = std::function<std::pair<int, json>(const httplib::Request&)>;

    // Runs a handler, mapping errors onto JSON replies. Mutating routes are
    // replayed from cache when the client repeats a request id.
    httplib::Server::Handler wrap(Handler handler, bool mutating)
    {
        return [this, handler = std::move(handler), mutating](const httplib::Request& req, httplib::Response& res) {
            std::optional<std::tuple<std::string, std::string, std::string>> key;
            if (mutating && req.has_header(kRequestIdHeader)) {
                key.emplace(req.method, req.path, req.get_header_value(kRequestIdHeader));
                std::lock_guard lock(idempotency_mutex);
                if (auto it = replies.find(*key); it != replies.end()) {
                    res.status = it->second.first;
                    res.set_content(it->second.second, "application/json");
                    res.set_header("Idempotent-Replay", "true");
                    return;
                }
            }
            try {
                auto [status, body] = handler(req);
                send_json(res, status, body);
                if (mutating) {
                    persist();
                }
            } catch (const Error& e) {
                send_error(res, status_for(e.code()), to_string(e.code()), e.what());
            } catch (const json::exception& e) {
                send_error(res, 400, "ValidationError", e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, "InternalError", e.what());
            }
            if (key && res.status < 500) {
                std::lock_guard lock(idempotency_mutex);
                if (replies.emplace(*key, std::make_pair(res.status, res.body)).second) {
                    reply_order.push_back(*key);
                    if (reply_order.size() > kIdempotencyCacheLimit) {
                        replies.erase(reply_order.front());
                        reply_order.pop_front();
                    }
                }
            }
        };
    }

    void routes()
    {
        server.Get("/health", wrap([this](const httplib::Request&) {
                       return std::pair{200, json{{"status", "ok"},
                                                  {"version", kVersion},
                                                  {"provider", provider->name()},
                                                  {"active_jobs", engine->active_jobs()}}};
                   }, false));

        server.Get("/documents", wrap([this](const httplib::Request& req) {
                       DocumentFilter filter;
                       if (req.has_param("kind")) {
                           const auto name = req.get_param_value("kind");
                           filter.kind = document_kind_from_string(name);
                           if (!filter.kind) {
                               fail(ErrorCode::ValidationError, "unknown kind '" + name + "'");
                           }
                       }
                       filter.title_prefix = req.get_param_value("title_prefix");
                       return std::pair{200, documents_json(store.query_documents(filter))};
                   }, false));

        server.Post("/documents", wrap([this](const httplib::Request& req) {
                        const auto body = parse_body(req);
                        const auto name = body.at("kind").get<std::string>();
                        auto kind = document_kind_from_string(name);
                        if (!kind) {
                            fail(ErrorCode::ValidationError, "unknown kind '" + name + "'");
                        }
                        std::vector<BlockPayload> blocks;
                        for (const auto& item : body.value("blocks", json::array())) {
                            blocks.push_back(codec::payload_from_json(item));
                        }
                        DocumentLinks links;
                        if (body.contains("default_persona") && !body.at("default_persona").is_null()) {
                            links.default_persona = DocumentId(body.at("default_persona").get<std::string>());
                        }
                        auto doc = store.create_document(*kind, body.at("title").get<std::string>(),
                                                         std::move(blocks), links);
                        return std::pair{201, codec::to_json(doc)};
                    }, true));

        server.Get(R"(/documents/([^/]+))", wrap([this](const httplib::Request& req) {
                       return std::pair{200, codec::to_json(store.get_document(DocumentId(req.matches[1].str())))};
                   }, false));

        auto update = wrap([this](const httplib::Request& req) {
            const auto body = parse_body(req);
            std::vector<BlockEdit> edits;
            for (const auto& item : body.at("edits")) {
                edits.push_back(edit_from_json(item));
            }
            auto doc = store.update_document(DocumentId(req.matches[1].str()), body.at("revision").get<Revision>(),
                                             edits);
            return std::pair{200, codec::to_json(doc)};
        }, true);
        server.Patch(R"(/documents/([^/]+))", update);
        server.Put(R"(/documents/([^/]+))", update);

        server.Delete(R"(/documents/([^/]+))", wrap([this](const httplib::Request& req) {
                          const auto id = req.matches[1].str();
                          store.delete_document(DocumentId(id));
                          return std::pair{200, json{{"deleted", id}}};
                      }, true));

        server.Get("/workspace/export", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(write_archive(ArchiveContents{store.snapshot(), provenance.all()}), "text/plain");
        });

        server.Post("/workspace/import", wrap([this](const httplib::Request& req) {
                        auto contents = read_archive(req.body);
                        const auto documents = contents.workspace.documents.size();
                        const auto records = contents.provenance.size();
                        if (engine->active_jobs() != 0) {
                            fail(ErrorCode::InvalidState, "cannot import while jobs are running");
                        }
                        store.replace(std::move(contents.workspace));
                        provenance.restore(std::move(contents.provenance));
                        return std::pair{200, json{{"documents", documents}, {"provenance", records}}};
                    }, true));

        server.Post("/operations", wrap([this](const httplib::Request& req) {
                        const auto submission = engine->submit_operation(codec::request_from_json(parse_body(req)));
                        json body{{"job", submission.job.value()}, {"result_block", nullptr}};
                        if (submission.result_block) {
                            body["result_block"] = submission.result_block->value();
                        }
                        return std::pair{202, body};
                    }, true));

        server.Post("/resolve", wrap([this](const httplib::Request& req) {
                        const auto record = engine->preview_grounding(codec::request_from_json(parse_body(req)));
                        auto body = codec::to_json(record);
                        body.erase("id");
                        body.erase("job");
                        return std::pair{200, body};
                    }, false));

        server.Get(R"(/jobs/([^/]+))", wrap([this](const httplib::Request& req) {
                       return std::pair{200, codec::to_json(engine->poll_job(JobId(req.matches[1].str())))};
                   }, false));

        server.Post(R"(/jobs/([^/]+)/cancel)", wrap([this](const httplib::Request& req) {
                        return std::pair{200, codec::to_json(engine->cancel_job(JobId(req.matches[1].str())))};
                    }, true));

        server.Get(R"(/jobs/([^/]+)/provenance)", wrap([this](const httplib::Request& req) {
                       return std::pair{200, codec::to_json(engine->get_provenance(JobId(req.matches[1].str())))};
                   }, false));

        server.Get(R"(/blocks/([^/]+))", wrap([this](const httplib::Request& req) {
                       return std::pair{200, codec::to_json(engine->result_block(BlockId(req.matches[1].str())))};
                   }, false));

        server.Post(R"(/blocks/([^/]+)/actions)", wrap([this](const httplib::Request& req) {
                        const auto body = parse_body(req);
                        const auto name = body.at("action").get<std::string>();
                        auto action = result_action_from_string(name);
                        if (!action) {
                            fail(ErrorCode::ValidationError, "unknown action '" + name + "'");
                        }
                        auto block = engine->apply_result_action(BlockId(req.matches[1].str()), *action);
                        return std::pair{200, codec::to_json(block)};
                    }, true));

        server.Get(R"(/blocks/([^/]+)/provenance)", wrap([this](const httplib::Request& req) {
                       return std::pair{200,
                                        codec::to_json(engine->get_block_provenance(BlockId(req.matches[1].str())))};
                   }, false));

        server.Get("/goal", wrap([this](const httplib::Request&) {
                       auto goal = store.goal();
                       return std::pair{200, goal ? codec::to_json(*goal) : json(nullptr)};
                   }, false));

        server.Post("/goal/execute", wrap([this](const httplib::Request& req) {
                        const auto body = parse_body(req);
                        auto result = engine->execute_goal(body.value("objective", std::string{}),
                                                           temperature_of(body, TemperatureLevel::Balanced));
                        json tasks = json::array();
                        for (const auto& task : result.tasks) {
                            tasks.push_back(codec::to_json(task));
                        }
                        return std::pair{200, json{{"job", result.job.value()},
                                                   {"tasks", std::move(tasks)},
                                                   {"warnings", result.warnings}}};
                    }, true));

        server.Post(R"(/tasks/([^/]+)/start)", wrap([this](const httplib::Request& req) {
                        return std::pair{200, codec::to_json(engine->start_task(TaskId(req.matches[1].str())))};
                    }, true));

        server.Post(R"(/tasks/([^/]+)/persona)", wrap([this](const httplib::Request& req) {
                        return std::pair{200,
                                         codec::to_json(engine->generate_task_persona(TaskId(req.matches[1].str())))};
                    }, true));

        server.Post(R"(/tasks/([^/]+)/do)", wrap([this](const httplib::Request& req) {
                        const auto body = parse_body(req);
                        auto submission = engine->do_task(TaskId(req.matches[1].str()),
                                                          temperature_of(body, TemperatureLevel::Balanced));
                        return std::pair{202, json{{"job", submission.job.value()},
                                                   {"result_block", submission.result_block
                                                                        ? json(submission.result_block->value())
                                                                        : json(nullptr)}}};
                    }, true));
    }
};

std::unique_ptr<Service> Service::start(const Config& config, std::shared_ptr<Provider> provider)
{
    ensure_data_dir(config);
    auto impl = std::make_unique<Impl>();
    impl->config = config;
    impl->provider = provider ? std::move(provider) : make_provider(config.provider);
    impl->audit = std::make_shared<AuditLog>(config.data_dir / kAuditFile);
    impl->load();

    EngineConfig engine_config;
    engine_config.temperatures = config.temperatures;
    engine_config.max_concurrent_jobs = config.max_concurrent_jobs;
    engine_config.job_timeout = config.job_timeout;
    impl->engine = std::make_unique<Engine>(impl->store, impl->provenance, impl->provider, engine_config, impl->audit);

    impl->routes();
    // the library default adds SO_REUSEPORT, which would let a second server share the port
    impl->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    if (config.port == 0) {
        impl->port = impl->server.bind_to_any_port(config.host);
        if (impl->port <= 0) {
            fail(ErrorCode::BindError, "cannot bind " + config.host + " on an ephemeral port");
        }
    } else {
        if (!impl->server.bind_to_port(config.host, config.port)) {
            fail(ErrorCode::BindError, "cannot bind " + config.host + ":" + std::to_string(config.port));
        }
        impl->port = config.port;
    }
    auto* raw = impl.get();
    impl->listener = std::thread([raw] { raw->server.listen_after_bind(); });
    impl->server.wait_until_ready();
    return std::unique_ptr<Service>(new Service(std::move(impl)));
}

Service::Service(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

Service::~Service() { shutdown(std::chrono::milliseconds(0)); }

int Service::port() const noexcept { return impl_->port; }
DocumentStore& Service::store() noexcept { return impl_->store; }
Engine& Service::engine() noexcept { return *impl_->engine; }
ProvenanceStore& Service::provenance() noexcept { return impl_->provenance; }

void Service::shutdown(std::chrono::milliseconds drain)
{
    {
        std::lock_guard lock(impl_->lifecycle_mutex);
        if (impl_->stopped) {
            return;
        }
        impl_->stopped = true;
    }
    impl_->server.stop();
    if (impl_->listener.joinable()) {
        impl_->listener.join();
    }
    impl_->engine->shutdown(drain);
    try {
        impl_->persist();
    } catch (const std::exception&) {
        // nothing useful to do on the way out; the last successful write stands
    }
    impl_->stopped_cv.notify_all();
}

void Service::wait()
{
    std::unique_lock lock(impl_->lifecycle_mutex);
    impl_->stopped_cv.wait(lock, [&] { return impl_->stopped; });
}

} // namespace orchid
