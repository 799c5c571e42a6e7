#include "orchid/provider.hpp"

#include "orchid/error.hpp"
#include "orchid/labeled_sections.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace orchid {

void validate_completion_params(const CompletionParams& params)
{
    if (!(params.temperature >= 0.0 && params.temperature <= 2.0)) {
        fail(ErrorCode::ValidationError, "sampling value must lie in [0, 2]");
    }
    if (params.max_output_tokens == 0) {
        fail(ErrorCode::ValidationError, "max output length must be positive");
    }
}

FixtureTable parse_fixture_table(std::string_view text)
{
    FixtureTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty() || line.front() == '#') {
            continue;
        }
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("template") || !j.contains("response")) {
            fail(ErrorCode::InvalidConfig, "fixture line " + std::to_string(number) + " is not a fixture record");
        }
        auto id = template_id_from_string(j["template"].get<std::string>());
        if (!id) {
            fail(ErrorCode::InvalidConfig, "fixture line " + std::to_string(number) + " names an unknown template");
        }
        table[FixtureKey{*id, j.value("digest", std::string("*"))}] = j["response"].get<std::string>();
    }
    return table;
}

FixtureTable load_fixture_table(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::InvalidConfig, "cannot read fixture file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_fixture_table(buffer.str());
}

ScriptedProvider::ScriptedProvider(FixtureTable fixtures) : fixtures_(std::move(fixtures)) {}

std::string ScriptedProvider::complete(const MetaPrompt& prompt, const CompletionParams& params, std::stop_token stop)
{
    validate_completion_params(params);
    std::unique_lock lock(mutex_);
    ++calls_;
    history_.push_back(prompt);
    if (stalled_) {
        const auto epoch = release_epoch_;
        const auto deadline = std::chrono::steady_clock::now() + params.timeout;
        const bool released =
            released_.wait_until(lock, stop, deadline, [&] { return release_epoch_ != epoch; });
        if (!released) {
            if (stop.stop_requested()) {
                fail(ErrorCode::Cancelled, "completion cancelled");
            }
            fail(ErrorCode::Timeout, "scripted provider stalled past the timeout");
        }
    }
    if (auto it = fixtures_.find(FixtureKey{prompt.template_id, prompt.params_digest}); it != fixtures_.end()) {
        return it->second;
    }
    if (auto it = fixtures_.find(FixtureKey{prompt.template_id, "*"}); it != fixtures_.end()) {
        return it->second;
    }
    return "ECHO:" + prompt.params_digest;
}

void ScriptedProvider::set_response(TemplateId id, std::string digest, std::string response)
{
    std::lock_guard lock(mutex_);
    fixtures_[FixtureKey{id, std::move(digest)}] = std::move(response);
}

void ScriptedProvider::stall()
{
    std::lock_guard lock(mutex_);
    stalled_ = true;
}

void ScriptedProvider::release()
{
    {
        std::lock_guard lock(mutex_);
        stalled_ = false;
        ++release_epoch_;
    }
    released_.notify_all();
}

std::vector<MetaPrompt> ScriptedProvider::calls() const
{
    std::lock_guard lock(mutex_);
    return history_;
}

std::string_view to_string(ProviderKind kind) noexcept
{
    return kind == ProviderKind::Scripted ? "scripted" : "remote-http";
}

std::optional<ProviderKind> provider_kind_from_string(std::string_view name) noexcept
{
    if (name == "scripted" || name == "Scripted") {
        return ProviderKind::Scripted;
    }
    if (name == "remote-http" || name == "RemoteHttp" || name == "remote") {
        return ProviderKind::RemoteHttp;
    }
    return std::nullopt;
}

RemoteHttpProvider::RemoteHttpProvider(ProviderConfig config) : config_(std::move(config))
{
    const std::string_view endpoint = config_.endpoint;
    constexpr std::string_view scheme = "http://";
    if (!endpoint.starts_with(scheme)) {
        fail(ErrorCode::InvalidConfig, "provider_endpoint must be an http:// URL");
    }
    const auto slash = endpoint.find('/', scheme.size());
    scheme_host_port_ = std::string(endpoint.substr(0, slash));
    path_ = slash == std::string_view::npos ? "/" : std::string(endpoint.substr(slash));
    if (scheme_host_port_.size() == scheme.size()) {
        fail(ErrorCode::InvalidConfig, "provider_endpoint has no host");
    }
}

std::string RemoteHttpProvider::complete(const MetaPrompt& prompt, const CompletionParams& params, std::stop_token stop)
{
    validate_completion_params(params);
    const nlohmann::json request{
        {"prompt", prompt.text},
        {"temperature", params.temperature},
        {"max_tokens", params.max_output_tokens},
        {"template", std::string(to_string(prompt.template_id))},
    };
    const auto body = request.dump();

    httplib::Headers headers;
    if (const char* token = std::getenv(config_.token_env_var.c_str()); token != nullptr && *token != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    const auto timeout = std::min(params.timeout, config_.timeout);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);

    std::string last_failure = "no attempt made";
    bool timed_out = false;
    for (unsigned attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (stop.stop_requested()) {
            fail(ErrorCode::Cancelled, "completion cancelled");
        }
        ++attempts_;
        httplib::Client client(scheme_host_port_);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());
        const auto started = std::chrono::steady_clock::now();
        auto result = client.Post(path_, headers, body, "application/json");
        if (!result) {
            timed_out = std::chrono::steady_clock::now() - started >= timeout;
            last_failure = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        timed_out = false;
        if (result->status >= 500) {
            last_failure = "status " + std::to_string(result->status) + ": " + result->body.substr(0, 200);
            continue;
        }
        if (result->status != 200) {
            fail(ErrorCode::RemoteError,
                 "status " + std::to_string(result->status) + ": " + result->body.substr(0, 200));
        }
        auto reply = nlohmann::json::parse(result->body, nullptr, false);
        if (reply.is_discarded() || !reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
            fail(ErrorCode::RemoteError, "response has no \"text\" field: " + result->body.substr(0, 200));
        }
        return reply["text"].get<std::string>();
    }
    const auto attempts = std::to_string(config_.max_retries + 1);
    if (timed_out) {
        fail(ErrorCode::Timeout, "provider timed out after " + attempts + " attempts");
    }
    fail(ErrorCode::RemoteError, "provider unreachable after " + attempts + " attempts (" + last_failure + ")");
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& config)
{
    if (config.kind == ProviderKind::RemoteHttp) {
        return std::make_shared<RemoteHttpProvider>(config);
    }
    FixtureTable fixtures;
    if (config.fixture_path) {
        fixtures = load_fixture_table(*config.fixture_path);
    }
    return std::make_shared<ScriptedProvider>(std::move(fixtures));
}

namespace {

bool is_space(char c) noexcept { return c == ' ' || c == '\t' || c == '\r'; }

// One pass of marker removal; returns true when something was stripped.
bool strip_marker(std::string_view& line)
{
    std::size_t i = 0;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') {
        ++i;
    }
    std::size_t marker = 0;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        marker = i + 1;
    } else if (!line.empty() && (line[0] == '-' || line[0] == '*' || line[0] == '+')) {
        marker = 1;
    } else if (line.starts_with("\xE2\x80\xA2")) { // bullet
        marker = 3;
    }
    if (marker == 0 || (marker < line.size() && !is_space(line[marker]))) {
        return false;
    }
    line.remove_prefix(marker);
    while (!line.empty() && is_space(line.front())) {
        line.remove_prefix(1);
    }
    return true;
}

} // namespace

TodoPlan parse_todo_response(std::string_view text)
{
    TodoPlan plan;
    std::vector<std::string> items;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        auto trimmed = trim(raw);
        std::string_view line = trimmed;
        while (strip_marker(line)) {
        }
        auto item = trim(line);
        if (!item.empty()) {
            items.push_back(std::move(item));
        }
    }
    if (items.empty()) {
        fail(ErrorCode::EmptyPlan, "plan response has no usable lines");
    }
    if (items.size() > kMaxPlanItems) {
        plan.warnings.push_back("plan had " + std::to_string(items.size()) + " items; kept the first " +
                                std::to_string(kMaxPlanItems));
        items.resize(kMaxPlanItems);
    }
    plan.tasks = std::move(items);
    return plan;
}

} // namespace orchid
