#include "oracles.hpp"
#include "workspace_gen.hpp"

#include "orchid/error.hpp"
#include "orchid/prompt_assembler.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace orchid;

namespace {

std::map<std::string, std::string> manifest()
{
    std::istringstream in(testgen::read_file(testgen::fixture_dir() / "templates" / "MANIFEST"));
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "ORCHID-TEMPLATES v1");
    std::map<std::string, std::string> out;
    std::string name;
    std::string digest;
    while (in >> name >> digest) {
        out[name] = digest;
    }
    return out;
}

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

} // namespace

TEST_CASE("stored templates match the fixture files byte for byte")
{
    const auto digests = manifest();
    REQUIRE(digests.size() == kAllTemplates.size());
    for (auto id : kAllTemplates) {
        const std::string name(to_string(id));
        CAPTURE(name);
        const auto fixture = testgen::read_file(testgen::fixture_dir() / "templates" / (name + ".txt"));
        CHECK(oracle::sha256_hex(fixture) == digests.at(name));
        CHECK(std::string(template_text(id)) == fixture);
    }
}

TEST_CASE("template names round-trip")
{
    for (auto id : kAllTemplates) {
        CHECK(template_id_from_string(to_string(id)) == id);
    }
    CHECK_FALSE(template_id_from_string("Nope").has_value());
}

TEST_CASE("every template uses only allowed placeholders")
{
    for (auto id : kAllTemplates) {
        for (const auto& name : template_placeholders(id)) {
            CHECK(allowed_placeholders().contains(name));
        }
    }
    CHECK(template_placeholders(TemplateId::ContextPrompt) == std::set<std::string>{"context", "prompt"});
    CHECK(template_placeholders(TemplateId::Todo) == std::set<std::string>{"objective"});
    CHECK(template_placeholders(TemplateId::MakePersona) == std::set<std::string>{"exception", "goal", "task"});
    CHECK(template_placeholders(TemplateId::AskPersona) == std::set<std::string>{"context", "persona", "prompt"});
}

TEST_CASE("render matches the golden files")
{
    const auto cases = nlohmann::json::parse(testgen::read_file(testgen::fixture_dir() / "golden" / "cases.json"));
    std::map<std::string, int> per_template;
    for (const auto& c : cases) {
        const auto name = c.at("template").get<std::string>();
        CAPTURE(name);
        auto params = c.at("params").get<ParameterMap>();
        const auto golden = testgen::read_file(testgen::fixture_dir() / "golden" / c.at("golden").get<std::string>());
        CHECK(render_meta_prompt(*template_id_from_string(name), params).text == golden);
        ++per_template[name];
    }
    for (auto id : kAllTemplates) {
        CHECK(per_template[std::string(to_string(id))] >= 10);
    }
}

TEST_CASE("render agrees with the substitution oracle on random values")
{
    std::mt19937_64 rng(7);
    for (auto id : kAllTemplates) {
        for (int round = 0; round < 20; ++round) {
            ParameterMap params;
            for (const auto& name : template_placeholders(id)) {
                params[name] = testgen::random_text(rng, 30);
            }
            const std::string tmpl(template_text(id));
            CHECK(render_meta_prompt(id, params).text == oracle::substitute(tmpl, params).value());
        }
    }
}

TEST_CASE("rendered prompts re-parse to the escaped parameter values")
{
    std::mt19937_64 rng(11);
    for (auto id : kAllTemplates) {
        for (int round = 0; round < 10; ++round) {
            ParameterMap params;
            for (const auto& name : template_placeholders(id)) {
                params[name] = escape_value(testgen::random_text(rng, 24));
            }
            const auto rendered = render_meta_prompt(id, params).text;
            auto recovered = oracle::recover_params(std::string(template_text(id)), rendered);
            REQUIRE(recovered.has_value());
            CHECK(*recovered == params);
        }
    }
}

TEST_CASE("substitution grammar")
{
    CHECK(substitute("a {{b}} c", {}) == "a {b} c");
    CHECK(substitute("{prompt}", {{"prompt", "{goal}"}}) == "{goal}"); // single pass
    CHECK(substitute("x}y", {}) == "x}y");
    CHECK(substitute("{{'persona': {persona}}}}", {{"persona", "P"}}) == "{'persona': P}}");
    CHECK(code_of([] { substitute("{unknown}", {}); }) == ErrorCode::UnknownPlaceholder);
    CHECK(code_of([] { substitute("{Prompt}", {}); }) == ErrorCode::UnknownPlaceholder);
    CHECK(code_of([] { substitute("{prompt", {}); }) == ErrorCode::UnknownPlaceholder);
    CHECK(code_of([] { substitute("{}", {}); }) == ErrorCode::UnknownPlaceholder);
    CHECK(code_of([] { substitute("{goal}", {}); }) == ErrorCode::MissingRequiredParameter);
    for (const char* t : {"{prompt", "{}", "{x y}", "a{{b{c}"}) {
        CHECK_FALSE(oracle::substitute(t, {{"prompt", "p"}}).has_value());
    }
}

TEST_CASE("missing persona for a persona template is rejected")
{
    CHECK(code_of([] { render_meta_prompt(TemplateId::AskPersona, {{"context", "[]"}, {"prompt", "p"}}); }) ==
          ErrorCode::MissingRequiredParameter);
}

TEST_CASE("ContextPrompt example")
{
    const auto text = render_meta_prompt(TemplateId::ContextPrompt,
                                         {{"context", oracle::serialize_records({{"selection", "abc"}})},
                                          {"prompt", "shorten"}})
                          .text;
    CHECK(text.find("{'text': [{'title': 'selection', 'text': 'abc'}], 'prompt': 'shorten'}") != std::string::npos);
}

TEST_CASE("Todo keeps the objective and the five-item instruction")
{
    const auto text = render_meta_prompt(TemplateId::Todo, {{"objective", "redesign fitness trackers"}}).text;
    CHECK(text.find("redesign fitness trackers") != std::string::npos);
    CHECK(text.find("The list should have no more than 5 items.") != std::string::npos);
}

TEST_CASE("template selection")
{
    CHECK(select_template(OperationKind::Summarize, true) == TemplateId::AskPersona);
    CHECK(select_template(OperationKind::Expand, false) == TemplateId::MasterNoPersona);
    CHECK(select_template(OperationKind::InlinePrompt, true) == TemplateId::ContextPrompt);
    CHECK(select_template(OperationKind::Search, false) == TemplateId::AskNoPersona);
    CHECK(select_template(OperationKind::Reflect, true) == TemplateId::CritiquePersona);
    CHECK(select_template(OperationKind::ExecuteGoal, true) == TemplateId::Todo);
    CHECK(select_template(OperationKind::DoTask, false) == TemplateId::DoTask);
    CHECK(select_template(OperationKind::GeneratePersona, false) == TemplateId::MakePersona);

    const std::map<TemplateId, TemplateId> pairs{{TemplateId::AskPersona, TemplateId::AskNoPersona},
                                                 {TemplateId::MasterPersona, TemplateId::MasterNoPersona},
                                                 {TemplateId::CritiquePersona, TemplateId::CritiqueNoPersona}};
    for (auto kind : kAllOperations) {
        const auto with = select_template(kind, true);
        const auto without = select_template(kind, false);
        if (auto it = pairs.find(with); it != pairs.end()) {
            CHECK(without == it->second);
        } else {
            CHECK(with == without);
        }
    }
}

TEST_CASE("document serialization matches the oracle serializer")
{
    CHECK(serialize_documents({}) == "[]");
    CHECK(serialize_documents({BundleDocument{DocumentId("d"), "market_research", "T", GroundingSource::HostPage, 1}}) ==
          "[{'title': 'market_research', 'text': 'T'}]");
    std::mt19937_64 rng(3);
    for (int round = 0; round < 200; ++round) {
        std::vector<BundleDocument> docs;
        std::vector<std::pair<std::string, std::string>> records;
        const auto n = rng() % 4;
        for (std::size_t i = 0; i < n; ++i) {
            auto title = testgen::random_text(rng, 10);
            auto text = testgen::random_text(rng, 40);
            docs.push_back(BundleDocument{DocumentId("d"), title, text, GroundingSource::HostPage, 1});
            records.emplace_back(title, text);
        }
        CHECK(serialize_documents(docs) == oracle::serialize_records(records));
    }
}

TEST_CASE("persona serialization keeps schema order")
{
    const auto text = serialize_persona(testgen::sample_persona("Dana"));
    const std::vector<std::string> keys{"'name'", "'biography'", "'skills'", "'expertise'", "'personality_traits'",
                                        "'work_style'"};
    std::size_t last = 0;
    for (const auto& key : keys) {
        const auto at = text.find(key);
        REQUIRE(at != std::string::npos);
        CHECK(at >= last);
        last = at;
    }
    CHECK(text.find("'skills': 'interviewing, synthesis'") != std::string::npos);
}

TEST_CASE("escaping")
{
    CHECK(escape_value("it's") == "it\\'s");
    CHECK(escape_value("a\\b") == "a\\\\b");
    CHECK(escape_value("line\nbreak") == "line\nbreak");
}

TEST_CASE("digest covers only the template's placeholders and is stable")
{
    const auto a = render_meta_prompt(TemplateId::Todo, {{"objective", "x"}});
    const auto b = render_meta_prompt(TemplateId::Todo, {{"objective", "x"}, {"prompt", "ignored"}});
    CHECK(a == b);
    CHECK(a.params_digest.size() == 16);
    CHECK(params_digest({{"a", "bc"}}) != params_digest({{"ab", "c"}}));
    CHECK(render_meta_prompt(TemplateId::Todo, {{"objective", "y"}}).params_digest != a.params_digest);
}

TEST_CASE("serialize_bundle checks coverage for the target template")
{
    ContextBundle bundle;
    OperationRequest request;
    request.kind = OperationKind::Ask;
    request.prompt = "why";
    CHECK(code_of([&] { serialize_bundle(bundle, request, TemplateId::AskPersona); }) ==
          ErrorCode::MissingRequiredParameter);
    const auto params = serialize_bundle(bundle, request, TemplateId::AskNoPersona);
    CHECK(params.at("context") == "[]");
    CHECK(params.at("prompt") == "why");

    request.kind = OperationKind::DoTask;
    CHECK(serialize_bundle(bundle, request, TemplateId::DoTask).at("persona") == kGenericTaskExecutor);

    request.kind = OperationKind::Summarize;
    request.prompt = "  ";
    CHECK_FALSE(serialize_bundle(bundle, request).at("prompt").empty());
}

TEST_CASE("all templates render in well under a second")
{
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 100; ++i) {
        for (auto id : kAllTemplates) {
            ParameterMap params;
            for (const auto& name : template_placeholders(id)) {
                params[name] = "value";
            }
            render_meta_prompt(id, params);
        }
    }
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
}
