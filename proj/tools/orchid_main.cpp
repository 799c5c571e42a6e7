#include "orchid/archive.hpp"
#include "orchid/config.hpp"
#include "orchid/error.hpp"
#include "orchid/prompt_assembler.hpp"
#include "orchid/service.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

extern char** environ;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int serve(const orchid::SettingMap& flags, const std::string& config_file, int drain_ms)
{
    std::optional<std::filesystem::path> file;
    if (!config_file.empty()) {
        file = config_file;
    }
    const auto config = orchid::load_config(orchid::environment_settings(environ), flags, file);
    auto service = orchid::Service::start(config);
    std::cout << "orchid " << orchid::kVersion << " listening on " << config.host << ":" << service->port()
              << std::endl;

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_interrupted) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    service->shutdown(std::chrono::milliseconds(drain_ms));
    return 0;
}

int render(const std::string& name, const std::vector<std::string>& params, bool digest_only)
{
    auto id = orchid::template_id_from_string(name);
    if (!id) {
        std::cerr << "unknown template '" << name << "'\n";
        return 2;
    }
    orchid::ParameterMap map;
    for (const auto& item : params) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            std::cerr << "parameter '" << item << "' is not key=value\n";
            return 2;
        }
        map[item.substr(0, eq)] = item.substr(eq + 1);
    }
    const auto prompt = orchid::render_meta_prompt(*id, map);
    if (digest_only) {
        std::cout << prompt.params_digest << "\n";
    } else {
        std::cout << prompt.text;
    }
    return 0;
}

int check_archive(const std::string& path)
{
    const auto contents = orchid::read_archive(read_file(path));
    std::cout << "ok: " << contents.workspace.documents.size() << " documents, " << contents.provenance.size()
              << " provenance records\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Orchid context-orchestration service"};
    app.require_subcommand(1);

    orchid::SettingMap flags;
    std::string config_file;
    int drain_ms = 5000;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    serve_cmd->add_option("--config", config_file, "JSON config file");
    serve_cmd->add_option("--drain-ms", drain_ms, "Grace period for running jobs on shutdown");
    std::map<std::string, std::pair<CLI::Option*, std::string>> raw;
    for (const char* key : orchid::kSettingKeys) {
        std::string flag = std::string("--") + key;
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        std::string env = key;
        std::transform(env.begin(), env.end(), env.begin(), [](unsigned char c) { return std::toupper(c); });
        auto& slot = raw[key];
        slot.first = serve_cmd->add_option(flag, slot.second, "overrides ORCHID_" + env);
    }

    std::string template_name;
    std::vector<std::string> params;
    bool digest_only = false;
    auto* render_cmd = app.add_subcommand("render", "Render a meta-prompt template");
    render_cmd->add_option("template", template_name)->required();
    render_cmd->add_option("-p,--param", params, "key=value");
    render_cmd->add_flag("--digest", digest_only, "Print only the parameter digest");

    std::string archive_path;
    auto* check_cmd = app.add_subcommand("check-archive", "Validate a workspace archive");
    check_cmd->add_option("path", archive_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) {
            for (const auto& [key, slot] : raw) {
                if (slot.first->count() > 0) {
                    flags[key] = slot.second;
                }
            }
            return serve(flags, config_file, drain_ms);
        }
        if (*render_cmd) {
            return render(template_name, params, digest_only);
        }
        return check_archive(archive_path);
    } catch (const orchid::Error& e) {
        std::cerr << orchid::to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
