#include "oracles.hpp"

#include "orchid/error.hpp"
#include "orchid/provider.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <future>
#include <random>
#include <thread>

using namespace orchid;
using namespace std::chrono_literals;

namespace {

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an orchid::Error");
    return ErrorCode::ValidationError;
}

MetaPrompt todo_prompt(const std::string& objective)
{
    return render_meta_prompt(TemplateId::Todo, {{"objective", objective}});
}

// Local HTTP server standing in for a remote model endpoint.
class StubServer {
public:
    explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler)
    {
        server_.Post("/v1/complete", [this, handler](const httplib::Request& req, httplib::Response& res) {
            ++hits;
            handler(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer()
    {
        server_.stop();
        thread_.join();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/complete"; }

    std::atomic<int> hits{0};

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

ProviderConfig remote(const std::string& endpoint, unsigned retries = 2)
{
    ProviderConfig config;
    config.kind = ProviderKind::RemoteHttp;
    config.endpoint = endpoint;
    config.max_retries = retries;
    config.timeout = 2s;
    config.token_env_var = "ORCHID_TEST_TOKEN";
    return config;
}

// A port that was free a moment ago and now has no listener.
int closed_port()
{
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    ::close(fd);
    return ntohs(addr.sin_port);
}

} // namespace

TEST_CASE("fixture table parsing")
{
    const auto table = parse_fixture_table(
        "# comment\n\n"
        R"({"template": "Todo", "digest": "abc", "response": "one\ntwo"})"
        "\n"
        R"({"template": "AskNoPersona", "response": "wild"})"
        "\n");
    CHECK(table.size() == 2);
    CHECK(table.at(FixtureKey{TemplateId::Todo, "abc"}) == "one\ntwo");
    CHECK(table.at(FixtureKey{TemplateId::AskNoPersona, "*"}) == "wild");
    CHECK(code_of([] { parse_fixture_table("not json"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { parse_fixture_table(R"({"template": "Nope", "response": ""})"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { load_fixture_table("/nonexistent/fixtures.jsonl"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("scripted provider answers by digest, then wildcard, then echo")
{
    const auto a = todo_prompt("a");
    const auto b = todo_prompt("b");
    ScriptedProvider provider;
    CHECK(provider.complete(a, {}) == "ECHO:" + a.params_digest);
    provider.set_response(TemplateId::Todo, "*", "any");
    provider.set_response(TemplateId::Todo, a.params_digest, "exact");
    CHECK(provider.complete(a, {}) == "exact");
    CHECK(provider.complete(b, {}) == "any");
    CHECK(provider.call_count() == 3);
    CHECK(provider.calls().back() == b);
}

TEST_CASE("scripted provider stalls until released, cancelled or timed out")
{
    ScriptedProvider provider;
    provider.stall();
    CompletionParams params;
    params.timeout = 50ms;
    CHECK(code_of([&] { provider.complete(todo_prompt("x"), params); }) == ErrorCode::Timeout);

    params.timeout = 10s;
    std::stop_source stop;
    auto cancelled = std::async(std::launch::async, [&] {
        return code_of([&] { provider.complete(todo_prompt("x"), params, stop.get_token()); });
    });
    std::this_thread::sleep_for(20ms);
    stop.request_stop();
    CHECK(cancelled.get() == ErrorCode::Cancelled);

    auto released = std::async(std::launch::async, [&] { return provider.complete(todo_prompt("x"), params); });
    std::this_thread::sleep_for(20ms);
    provider.release();
    CHECK(released.get().rfind("ECHO:", 0) == 0);
}

TEST_CASE("completion parameters are validated")
{
    ScriptedProvider provider;
    CompletionParams params;
    params.temperature = 2.5;
    CHECK(code_of([&] { provider.complete(todo_prompt("x"), params); }) == ErrorCode::ValidationError);
    params.temperature = 0.2;
    params.max_output_tokens = 0;
    CHECK(code_of([&] { provider.complete(todo_prompt("x"), params); }) == ErrorCode::ValidationError);
}

TEST_CASE("remote provider sends the documented request and reads text back")
{
    ::setenv("ORCHID_TEST_TOKEN", "s3cret", 1);
    nlohmann::json seen;
    std::string auth;
    StubServer stub([&](const httplib::Request& req, httplib::Response& res) {
        seen = nlohmann::json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(R"({"text": "hello"})", "application/json");
    });
    RemoteHttpProvider provider(remote(stub.endpoint()));
    CompletionParams params;
    params.temperature = 0.2;
    params.max_output_tokens = 77;
    const auto prompt = todo_prompt("plan a trip");
    CHECK(provider.complete(prompt, params) == "hello");
    CHECK(seen.at("prompt") == prompt.text);
    CHECK(seen.at("temperature") == 0.2);
    CHECK(seen.at("max_tokens") == 77);
    CHECK(seen.at("template") == "Todo");
    CHECK(auth == "Bearer s3cret");
    ::unsetenv("ORCHID_TEST_TOKEN");
}

TEST_CASE("remote provider retries server errors max_retries times")
{
    StubServer stub([](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
        res.set_content("busy", "text/plain");
    });
    RemoteHttpProvider provider(remote(stub.endpoint(), 2));
    CHECK(code_of([&] { provider.complete(todo_prompt("x"), {}); }) == ErrorCode::RemoteError);
    CHECK(stub.hits == 3);
    CHECK(provider.attempt_count() == 3);
}

TEST_CASE("remote provider does not retry client errors")
{
    StubServer stub([](const httplib::Request&, httplib::Response& res) {
        res.status = 400;
        res.set_content("bad", "text/plain");
    });
    RemoteHttpProvider provider(remote(stub.endpoint(), 3));
    CHECK(code_of([&] { provider.complete(todo_prompt("x"), {}); }) == ErrorCode::RemoteError);
    CHECK(stub.hits == 1);
}

TEST_CASE("unreachable endpoint fails after 1 + max_retries attempts")
{
    const int port = closed_port();
    RemoteHttpProvider provider(remote("http://127.0.0.1:" + std::to_string(port) + "/v1", 2));
    CHECK(code_of([&] { provider.complete(todo_prompt("x"), {}); }) == ErrorCode::RemoteError);
    CHECK(provider.attempt_count() == 3);
}

TEST_CASE("slow endpoint times out")
{
    StubServer stub([](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(1500ms);
        res.set_content(R"({"text": "late"})", "application/json");
    });
    auto config = remote(stub.endpoint(), 0);
    config.timeout = 200ms;
    RemoteHttpProvider provider(config);
    CHECK(code_of([&] { provider.complete(todo_prompt("x"), {}); }) == ErrorCode::Timeout);
}

TEST_CASE("malformed replies and bad endpoints")
{
    StubServer stub([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"output": "x"})", "application/json");
    });
    RemoteHttpProvider provider(remote(stub.endpoint()));
    CHECK(code_of([&] { provider.complete(todo_prompt("x"), {}); }) == ErrorCode::RemoteError);
    CHECK(code_of([] { RemoteHttpProvider p(remote("https://example.com/v1")); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { RemoteHttpProvider p(remote("http:///v1")); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("todo parsing")
{
    auto plan = parse_todo_response("1. Interview users\n\n2) Draft personas\n- Sketch\n* Test\n+ Ship\n");
    CHECK(plan.tasks == std::vector<std::string>{"Interview users", "Draft personas", "Sketch", "Test", "Ship"});
    CHECK(plan.warnings.empty());

    plan = parse_todo_response("a\nb\nc\nd\ne\nf\ng\n");
    CHECK(plan.tasks.size() == 5);
    CHECK(plan.warnings.size() == 1);

    CHECK(code_of([] { parse_todo_response(""); }) == ErrorCode::EmptyPlan);
    CHECK(code_of([] { parse_todo_response("\n  \n- \n1.\n"); }) == ErrorCode::EmptyPlan);
    CHECK(parse_todo_response("-5 degrees outside").tasks == std::vector<std::string>{"-5 degrees outside"});
    CHECK(parse_todo_response("\xE2\x80\xA2 bullet").tasks == std::vector<std::string>{"bullet"});
}

TEST_CASE("todo parsing agrees with the regex oracle")
{
    std::mt19937_64 rng(23);
    const std::vector<std::string> pieces{"1.", "2)", "-", "*", "+", "\xE2\x80\xA2", " ", "\t", "word", "10.5",
                                          "\n", "\r\n", "x-y", "  ", "3. ", "- - "};
    for (int round = 0; round < 3000; ++round) {
        std::string text;
        const auto n = rng() % 14;
        for (std::size_t i = 0; i < n; ++i) {
            text += pieces[rng() % pieces.size()];
        }
        CAPTURE(text);
        auto expected = oracle::todo_lines(text);
        if (expected.empty()) {
            CHECK(code_of([&] { parse_todo_response(text); }) == ErrorCode::EmptyPlan);
            continue;
        }
        const auto plan = parse_todo_response(text);
        if (expected.size() > kMaxPlanItems) {
            expected.resize(kMaxPlanItems);
            CHECK(plan.warnings.size() == 1);
        }
        CHECK(plan.tasks == expected);
    }
}
