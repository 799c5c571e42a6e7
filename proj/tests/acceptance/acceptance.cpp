// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include "oracles.hpp"
#include "scenarios.hpp"
#include "workspace_gen.hpp"

#include "orchid/archive.hpp"
#include "orchid/engine.hpp"
#include "orchid/error.hpp"
#include "orchid/mentions.hpp"
#include "orchid/persona.hpp"
#include "orchid/prompt_assembler.hpp"
#include "orchid/service.hpp"

#include <httplib.h>

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <iostream>
#include <sstream>

using namespace orchid;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    std::string name;
    std::function<std::string()> run; // returns a detail line; throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& message)
{
    if (!condition) {
        throw Failure(message);
    }
}

double ms_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

class SequenceProvider : public Provider {
public:
    explicit SequenceProvider(std::deque<std::string> responses) : responses_(std::move(responses)) {}

    std::string complete(const MetaPrompt& prompt, const CompletionParams&, std::stop_token) override
    {
        std::lock_guard lock(mutex_);
        prompts.push_back(prompt);
        auto out = responses_.front();
        if (responses_.size() > 1) {
            responses_.pop_front();
        }
        return out;
    }
    std::string_view name() const noexcept override { return "sequence"; }

    std::vector<MetaPrompt> prompts;

private:
    std::mutex mutex_;
    std::deque<std::string> responses_;
};

std::string template_fidelity()
{
    const auto dir = testgen::fixture_dir();
    std::istringstream manifest(testgen::read_file(dir / "templates" / "MANIFEST"));
    std::string line;
    std::getline(manifest, line);
    expect(line == "ORCHID-TEMPLATES v1", "manifest header");
    std::map<std::string, std::string> digests;
    std::string name;
    std::string digest;
    while (manifest >> name >> digest) {
        digests[name] = digest;
    }
    expect(digests.size() == kAllTemplates.size(), "manifest lists every template");
    for (auto id : kAllTemplates) {
        const std::string n(to_string(id));
        const auto fixture = testgen::read_file(dir / "templates" / (n + ".txt"));
        expect(oracle::sha256_hex(fixture) == digests.at(n), n + " fixture digest");
        expect(std::string(template_text(id)) == fixture, n + " stored text differs from fixture");
    }

    const auto cases = nlohmann::json::parse(testgen::read_file(dir / "golden" / "cases.json"));
    std::map<std::string, int> per_template;
    const auto start = Clock::now();
    for (const auto& c : cases) {
        const auto n = c.at("template").get<std::string>();
        const auto golden = testgen::read_file(dir / "golden" / c.at("golden").get<std::string>());
        const auto rendered = render_meta_prompt(*template_id_from_string(n), c.at("params").get<ParameterMap>());
        expect(rendered.text == golden, "golden mismatch " + c.at("golden").get<std::string>());
        ++per_template[n];
    }
    const auto elapsed = ms_since(start);
    for (auto id : kAllTemplates) {
        expect(per_template[std::string(to_string(id))] >= 10, std::string(to_string(id)) + " has < 10 cases");
    }
    expect(elapsed < 1000.0, "rendering took " + std::to_string(elapsed) + " ms");
    return std::to_string(kAllTemplates.size()) + " templates byte-match, " + std::to_string(cases.size()) +
           " golden renders in " + std::to_string(static_cast<int>(elapsed)) + " ms";
}

std::string grounding_truth_table()
{
    const auto outcomes = scenarios::grounding_truth_table();
    expect(outcomes.size() == 16, "expected 16 cases, got " + std::to_string(outcomes.size()));
    for (const auto& o : outcomes) {
        expect(o.pass, o.name + ": " + o.detail);
    }
    return "16/16 cases";
}

std::string mention_corpus()
{
    std::istringstream in(testgen::read_file(testgen::fixture_dir() / "mentions" / "corpus.txt"));
    std::vector<oracle::Name> names;
    std::vector<std::string> lines;
    std::string line;
    std::string section;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (line == "[registry]" || line == "[corpus]") {
            section = line;
            continue;
        }
        if (section == "[registry]") {
            const bool persona = line.rfind("persona ", 0) == 0;
            names.push_back({persona ? line.substr(8) : line, "doc-" + std::to_string(names.size()), persona});
        } else {
            lines.push_back(line);
        }
    }
    expect(lines.size() >= 30, "corpus has only " + std::to_string(lines.size()) + " lines");
    NameRegistry registry;
    for (const auto& n : names) {
        registry.add(n.name, DocumentId(n.id), n.persona);
    }
    std::size_t mentions = 0;
    for (const auto& text : lines) {
        const auto actual = parse_mentions(text, registry);
        const auto expected = oracle::brute_force_mentions(text, names);
        expect(actual.size() == expected.size(), "count differs on: " + text);
        for (std::size_t i = 0; i < actual.size(); ++i) {
            const bool same = actual[i].raw == expected[i].raw && to_string(actual[i].target_kind) == expected[i].kind &&
                              actual[i].target.value_or(DocumentId()).value() == expected[i].target &&
                              actual[i].start == expected[i].start && actual[i].end == expected[i].end;
            expect(same, "mention " + std::to_string(i) + " differs on: " + text);
        }
        mentions += actual.size();
    }
    return std::to_string(lines.size()) + " lines, " + std::to_string(mentions) + " mentions, 100% agreement";
}

std::vector<std::string> sorted(std::vector<std::string> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<std::string> record_titles(const ProvenanceRecord& record)
{
    std::vector<std::string> out;
    for (const auto& doc : record.documents) {
        out.push_back(doc.title);
    }
    return sorted(out);
}

std::string provenance_bijection()
{
    std::size_t regenerated = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto tag = "seed " + std::to_string(seed);
        std::mt19937_64 rng(seed);
        DocumentStore store(testgen::seeded_options(seed));
        testgen::populate(store, rng);
        ProvenanceStore provenance;
        auto provider = std::make_shared<ScriptedProvider>();
        Engine engine(store, provenance, provider);

        const auto request = testgen::random_request(store, rng);
        const auto submission = engine.submit_operation(request);
        expect(engine.wait_job(submission.job, 5s).state == JobState::Complete, tag + ": job did not complete");
        const auto record = engine.get_provenance(submission.job);
        const auto prompt = provider->calls().back();
        expect(sorted(oracle::context_titles(prompt.text)) == record_titles(record),
               tag + ": rendered titles differ from the record");
        expect(record.params_digest == prompt.params_digest, tag + ": digest differs");

        if (submission.result_block) {
            engine.apply_result_action(*submission.result_block, ResultAction::Regenerate);
            const auto block = engine.result_block(*submission.result_block);
            expect(block.job != submission.job, tag + ": regenerate reused the job");
            engine.wait_job(block.job, 5s);
            expect(engine.get_provenance(submission.job) == record, tag + ": record changed after regenerate");
            const auto fresh = engine.get_provenance(block.job);
            expect(fresh.id != record.id, tag + ": regenerate reused the record");
            expect(sorted(oracle::context_titles(provider->calls().back().text)) == record_titles(fresh),
                   tag + ": regenerated titles differ");
            ++regenerated;
        }
    }
    return "100 workspaces, " + std::to_string(regenerated) + " regenerated with records unchanged";
}

double percentile(std::vector<double> samples, double p)
{
    std::sort(samples.begin(), samples.end());
    const auto index = static_cast<std::size_t>(p * static_cast<double>(samples.size() - 1));
    return samples[index];
}

std::string async_submission()
{
    Config config;
    config.port = 0;
    config.data_dir = std::filesystem::temp_directory_path() / "orchid-acceptance-async";
    std::filesystem::remove_all(config.data_dir);
    auto provider = std::make_shared<ScriptedProvider>();
    auto service = Service::start(config, provider);
    httplib::Client client("127.0.0.1", service->port());
    const auto home = service->store().home_id().value();

    provider->stall();
    const auto stall_start = Clock::now();
    std::vector<std::string> jobs;
    double worst_submit = 0.0;
    for (int i = 0; i < 3; ++i) {
        const nlohmann::json body{{"kind", "Ask"}, {"prompt", "question " + std::to_string(i)}, {"host_page", home}};
        const auto start = Clock::now();
        auto res = client.Post("/operations", body.dump(), "application/json");
        worst_submit = std::max(worst_submit, ms_since(start));
        expect(res && res->status == 202, "submission was not accepted");
        jobs.push_back(nlohmann::json::parse(res->body).at("job").get<std::string>());
    }
    expect(worst_submit < 50.0, "submission took " + std::to_string(worst_submit) + " ms");

    std::vector<double> crud;
    auto timed = [&](const std::function<httplib::Result()>& call, int status) {
        const auto start = Clock::now();
        auto res = call();
        crud.push_back(ms_since(start));
        expect(res && res->status == status, "CRUD request failed");
        return nlohmann::json::parse(res->body);
    };
    std::size_t n = 0;
    while (Clock::now() - stall_start < 5s) {
        const nlohmann::json create{{"kind", "Workbook"}, {"title", "crud " + std::to_string(n++)},
                                    {"blocks", {{{"kind", "Paragraph"}, {"text", "text"}}}}};
        const auto doc = timed([&] { return client.Post("/documents", create.dump(), "application/json"); }, 201);
        const auto path = "/documents/" + doc.at("id").get<std::string>();
        const nlohmann::json edit{{"revision", doc.at("revision")},
                                  {"edits", {{{"op", "append"}, {"payload", {{"kind", "Paragraph"}, {"text", "more"}}}}}}};
        timed([&] { return client.Patch(path, edit.dump(), "application/json"); }, 200);
        timed([&] { return client.Get(path); }, 200);
        timed([&] { return client.Get("/documents"); }, 200);
        timed([&] { return client.Delete(path); }, 200);
        for (const auto& id : jobs) {
            expect(!is_terminal(service->engine().poll_job(JobId(id)).state), "a stalled job finished early");
        }
    }
    provider->release();
    for (const auto& id : jobs) {
        expect(service->engine().wait_job(JobId(id), 5s).state == JobState::Complete,
               "job did not complete after release");
    }
    service->shutdown(1s);
    const auto p99 = percentile(crud, 0.99);
    expect(p99 < 100.0, "CRUD p99 " + std::to_string(p99) + " ms");
    std::ostringstream detail;
    detail << "3 HTTP submissions during a 5 s stall, worst " << worst_submit << " ms; " << crud.size()
           << " HTTP CRUD requests, p99 " << p99 << " ms";
    return detail.str();
}

std::string goal_persona_pipeline()
{
    auto make_engine = [](DocumentStore& store, ProvenanceStore& provenance, std::shared_ptr<Provider> provider) {
        return std::make_unique<Engine>(store, provenance, std::move(provider));
    };
    for (int lines : {0, 5, 7}) {
        std::string response;
        for (int i = 0; i < lines; ++i) {
            response += std::to_string(i + 1) + ". Step " + std::to_string(i + 1) + "\n";
        }
        DocumentStore store(testgen::seeded_options(1));
        ProvenanceStore provenance;
        auto provider = std::make_shared<ScriptedProvider>();
        provider->set_response(TemplateId::Todo, "*", response);
        auto engine = make_engine(store, provenance, provider);
        std::size_t tasks = 0;
        try {
            tasks = engine->execute_goal("Redesign fitness trackers", TemperatureLevel::Balanced).tasks.size();
        } catch (const Error& e) {
            expect(lines == 0 && e.code() == ErrorCode::EmptyPlan, "unexpected error: " + std::string(e.what()));
        }
        const auto goal = store.goal();
        const auto stored = goal ? goal->tasks.size() : 0;
        expect(tasks <= kMaxPlanItems && stored <= kMaxPlanItems, std::to_string(lines) + " lines gave too many tasks");
        expect(tasks == std::min<std::size_t>(lines, kMaxPlanItems), std::to_string(lines) + " lines: wrong count");
    }

    Persona persona = testgen::sample_persona("Maya Lin");
    expect(parse_persona_response(serialize_persona_json(persona)) == persona, "persona JSON round-trip");
    std::string body;
    for (const auto& payload : persona_page_blocks(persona)) {
        body += (body.empty() ? "" : "\n") + std::get<Paragraph>(payload).text;
    }
    expect(parse_persona_page(body) == persona, "persona page round-trip");

    {
        auto second = testgen::sample_persona("Omar Haddad");
        auto provider = std::make_shared<SequenceProvider>(std::deque<std::string>{
            "1. Interview users\n", serialize_persona_json(persona), serialize_persona_json(second),
            serialize_persona_json(testgen::sample_persona("Third"))});
        DocumentStore store(testgen::seeded_options(2));
        ProvenanceStore provenance;
        auto engine = make_engine(store, provenance, provider);
        const auto task = engine->execute_goal("Goal", TemperatureLevel::Balanced).tasks.at(0).id;
        engine->generate_task_persona(task);
        engine->generate_task_persona(task);
        engine->generate_task_persona(task);
        const auto text = std::string(template_text(TemplateId::MakePersona));
        const auto first = oracle::recover_params(text, provider->prompts.at(1).text);
        const auto third = oracle::recover_params(text, provider->prompts.at(3).text);
        expect(first && third, "persona prompt does not match its template");
        expect(first->at("exception").empty(), "first persona prompt has exceptions");
        expect(third->at("exception") == "Maya Lin, Omar Haddad",
               "exception was '" + third->at("exception") + "'");
    }

    {
        auto provider = std::make_shared<SequenceProvider>(std::deque<std::string>{
            "1. Interview users\n", R"({"name": "X", "biography": "b", "skills": "s"})"});
        DocumentStore store(testgen::seeded_options(3));
        ProvenanceStore provenance;
        auto engine = make_engine(store, provenance, provider);
        const auto task = engine->execute_goal("Goal", TemperatureLevel::Balanced).tasks.at(0).id;
        bool rejected = false;
        try {
            engine->generate_task_persona(task);
        } catch (const Error& e) {
            rejected = e.code() == ErrorCode::MalformedPersona;
        }
        expect(rejected, "missing-field persona was not rejected");
        expect(provider->prompts.size() == 3, "expected 2 persona calls, got " +
                                                  std::to_string(provider->prompts.size() - 1));
    }
    return "0/5/7 lines -> 0/5/5 tasks; schema round-trips; prior names in exception; 2 calls before rejection";
}

std::string persistence()
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(seed);
        DocumentStore store(testgen::seeded_options(seed));
        testgen::populate(store, rng);
        const auto workspace = store.snapshot();
        const ArchiveContents contents{workspace, testgen::random_records(workspace, rng)};
        const auto bytes = write_archive(contents);
        const auto back = read_archive(bytes);
        const auto tag = "seed " + std::to_string(seed);
        expect(back.workspace == contents.workspace, tag + ": workspace differs");
        expect(back.provenance == contents.provenance, tag + ": provenance differs");

        DocumentStore restored(testgen::seeded_options(seed + 1000));
        restored.replace(back.workspace);
        ProvenanceStore records;
        records.restore(back.provenance);
        expect(write_archive(ArchiveContents{restored.snapshot(), records.all()}) == bytes, tag + ": bytes differ");
    }
    return "50 workspaces round-trip with provenance";
}

std::optional<JobState> state_named(const std::string& name)
{
    for (auto s : {JobState::Pending, JobState::Running, JobState::Complete, JobState::Failed, JobState::Cancelled}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

std::string state_machine_fuzz()
{
    constexpr int kSequences = 10000;
    constexpr int kPerEngine = 200;
    std::size_t transitions = 0;
    std::size_t forbidden = 0;
    std::size_t rejected = 0;
    std::size_t jobs_seen = 0;
    std::mt19937_64 rng(2024);

    for (int batch = 0; batch < kSequences / kPerEngine; ++batch) {
        DocumentStore store(testgen::seeded_options(batch));
        ProvenanceStore provenance;
        auto provider = std::make_shared<ScriptedProvider>();
        auto audit = std::make_shared<AuditLog>();
        EngineConfig config;
        config.max_concurrent_jobs = 2;
        config.job_timeout = 2s;
        auto engine = std::make_unique<Engine>(store, provenance, provider, config, audit);
        std::map<JobId, JobState> observed;

        auto observe = [&](const Job& job) {
            auto [it, inserted] = observed.try_emplace(job.id, job.state);
            if (!inserted && it->second != job.state) {
                const bool ok = is_allowed_transition(it->second, job.state) ||
                                (it->second == JobState::Pending && is_terminal(job.state));
                forbidden += ok ? 0 : 1;
                if (is_terminal(it->second)) {
                    forbidden += 1;
                }
                it->second = job.state;
            }
        };

        for (int s = 0; s < kPerEngine; ++s) {
            std::vector<JobId> jobs;
            std::vector<BlockId> blocks;
            const int steps = 2 + static_cast<int>(rng() % 7);
            for (int step = 0; step < steps; ++step) {
                try {
                    switch (rng() % 7) {
                    case 0:
                    case 1: {
                        OperationRequest request;
                        request.kind = (rng() % 2) ? OperationKind::Ask : OperationKind::Summarize;
                        request.prompt = "q";
                        request.host_page = store.home_id();
                        auto submission = engine->submit_operation(request);
                        jobs.push_back(submission.job);
                        blocks.push_back(*submission.result_block);
                        break;
                    }
                    case 2:
                        if (!jobs.empty()) {
                            observe(engine->cancel_job(jobs[rng() % jobs.size()]));
                        }
                        break;
                    case 3:
                        if (rng() % 2) {
                            provider->stall();
                        } else {
                            provider->release();
                        }
                        break;
                    case 4:
                        if (!blocks.empty()) {
                            auto block = engine->apply_result_action(blocks[rng() % blocks.size()],
                                                                     ResultAction::Regenerate);
                            jobs.push_back(block.job);
                        }
                        break;
                    case 5:
                        if (!blocks.empty()) {
                            const auto i = rng() % blocks.size();
                            engine->apply_result_action(blocks[i], ResultAction::Discard);
                        }
                        break;
                    case 6:
                        if (!jobs.empty()) {
                            observe(engine->wait_job(jobs[rng() % jobs.size()], 1ms));
                        }
                        break;
                    }
                } catch (const Error&) {
                    ++rejected;
                }
                for (const auto& id : jobs) {
                    observe(engine->poll_job(id));
                }
            }
            provider->release();
            for (const auto& id : jobs) {
                engine->cancel_job(id);
                observe(engine->poll_job(id));
            }
        }
        engine->shutdown(1s);
        for (const auto& job : engine->jobs()) {
            observe(job);
            forbidden += is_terminal(job.state) ? 0 : 1;
        }
        jobs_seen += observed.size();

        std::map<std::string, JobState> chain;
        for (const auto& record : audit->records()) {
            if (record.value("event", "") != "transition") {
                continue;
            }
            ++transitions;
            const auto job = record.at("job").get<std::string>();
            const auto from = state_named(record.at("from").get<std::string>());
            const auto to = state_named(record.at("to").get<std::string>());
            const auto current = chain.try_emplace(job, JobState::Pending).first;
            if (!from || !to || *from != current->second || !is_allowed_transition(*from, *to)) {
                ++forbidden;
            }
            if (to) {
                current->second = *to;
            }
        }
    }
    expect(forbidden == 0, std::to_string(forbidden) + " forbidden transitions");
    return std::to_string(kSequences) + " sequences, " + std::to_string(jobs_seen) + " jobs, " +
           std::to_string(transitions) + " audited transitions, " + std::to_string(rejected) +
           " rejected actions, 0 forbidden";
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {"template-fidelity", template_fidelity},
        {"grounding-truth-table", grounding_truth_table},
        {"mention-corpus", mention_corpus},
        {"provenance-bijection", provenance_bijection},
        {"async-submission", async_submission},
        {"goal-persona-pipeline", goal_persona_pipeline},
        {"persistence-round-trip", persistence},
        {"job-state-fuzz", state_machine_fuzz},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool pass = false;
        try {
            detail = c.run();
            pass = true;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        failures += pass ? 0 : 1;
        std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
