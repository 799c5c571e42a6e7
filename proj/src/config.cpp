#include "orchid/config.hpp"

#include "orchid/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace orchid {

namespace {

bool known_key(const std::string& key)
{
    return std::any_of(std::begin(kSettingKeys), std::end(kSettingKeys),
                       [&](const char* k) { return key == k; });
}

long long parse_integer(const std::string& key, const std::string& value, long long min, long long max)
{
    long long out = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end || out < min || out > max) {
        fail(ErrorCode::InvalidConfig, key + ": expected an integer in [" + std::to_string(min) + ", " +
                                           std::to_string(max) + "], got '" + value + "'");
    }
    return out;
}

double parse_temperature(const std::string& key, const std::string& value)
{
    std::istringstream in(value);
    double out = 0.0;
    in >> out;
    if (in.fail() || !in.eof() || out < 0.0 || out > 2.0) {
        fail(ErrorCode::InvalidConfig, key + ": expected a number in [0, 2], got '" + value + "'");
    }
    return out;
}

SettingMap file_settings(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::InvalidConfig, "config file " + path.string() + " cannot be read");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidConfig, "config file " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) {
        fail(ErrorCode::InvalidConfig, "config file must hold a JSON object");
    }
    SettingMap out;
    for (const auto& [key, value] : doc.items()) {
        if (key == "temperatures") {
            if (!value.is_object()) {
                fail(ErrorCode::InvalidConfig, "temperatures: expected an object");
            }
            for (auto level : {TemperatureLevel::Precise, TemperatureLevel::Balanced, TemperatureLevel::Creative}) {
                const std::string name(to_string(level));
                if (!value.contains(name) || !value[name].is_number()) {
                    fail(ErrorCode::InvalidConfig, "temperatures." + name + ": missing or not a number");
                }
                std::string lowered = name;
                std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
                out["temperature_" + lowered] = nlohmann::json(value[name].get<double>()).dump();
            }
            if (value.size() != 3) {
                fail(ErrorCode::InvalidConfig, "temperatures: unknown level name");
            }
            continue;
        }
        if (value.is_string()) {
            out[key] = value.get<std::string>();
        } else if (value.is_number() || value.is_boolean()) {
            out[key] = value.dump();
        } else {
            fail(ErrorCode::InvalidConfig, key + ": expected a scalar value");
        }
    }
    return out;
}

void apply(Config& config, const std::string& key, const std::string& value)
{
    if (!known_key(key)) {
        fail(ErrorCode::InvalidConfig, "unknown setting '" + key + "'");
    }
    if (key == "host") {
        if (value.empty()) {
            fail(ErrorCode::InvalidConfig, "host: must not be empty");
        }
        config.host = value;
    } else if (key == "port") {
        config.port = static_cast<int>(parse_integer(key, value, 0, 65535));
    } else if (key == "data_dir") {
        if (value.empty()) {
            fail(ErrorCode::InvalidConfig, "data_dir: must not be empty");
        }
        config.data_dir = value;
    } else if (key == "provider") {
        auto kind = provider_kind_from_string(value);
        if (!kind) {
            fail(ErrorCode::InvalidConfig, "provider: expected 'scripted' or 'remote-http', got '" + value + "'");
        }
        config.provider.kind = *kind;
    } else if (key == "provider_endpoint") {
        config.provider.endpoint = value;
    } else if (key == "provider_token_var") {
        config.provider.token_env_var = value;
    } else if (key == "provider_fixtures") {
        config.provider.fixture_path = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
    } else if (key == "provider_timeout_ms") {
        config.provider.timeout = std::chrono::milliseconds(parse_integer(key, value, 1, 3600000));
    } else if (key == "provider_max_retries") {
        config.provider.max_retries = static_cast<unsigned>(parse_integer(key, value, 0, 10));
    } else if (key == "max_concurrent_jobs") {
        config.max_concurrent_jobs = static_cast<std::size_t>(parse_integer(key, value, 1, 256));
    } else if (key == "job_timeout_ms") {
        config.job_timeout = std::chrono::milliseconds(parse_integer(key, value, 1, 3600000));
    } else if (key == "temperature_precise") {
        config.temperatures.values[TemperatureLevel::Precise] = parse_temperature(key, value);
    } else if (key == "temperature_balanced") {
        config.temperatures.values[TemperatureLevel::Balanced] = parse_temperature(key, value);
    } else if (key == "temperature_creative") {
        config.temperatures.values[TemperatureLevel::Creative] = parse_temperature(key, value);
    }
}

} // namespace

Config load_config(const SettingMap& env, const SettingMap& flags, const std::optional<std::filesystem::path>& file)
{
    Config config;
    if (file) {
        for (const auto& [key, value] : file_settings(*file)) {
            apply(config, key, value);
        }
    }
    for (const auto& layer : {std::cref(env), std::cref(flags)}) {
        for (const auto& [key, value] : layer.get()) {
            apply(config, key, value);
        }
    }
    if (config.provider.kind == ProviderKind::RemoteHttp && config.provider.endpoint.empty()) {
        fail(ErrorCode::InvalidConfig, "provider_endpoint: required for the remote-http provider");
    }
    return config;
}

SettingMap environment_settings(char** envp)
{
    SettingMap out;
    if (envp == nullptr) {
        return out;
    }
    constexpr std::string_view prefix = "ORCHID_";
    for (char** entry = envp; *entry != nullptr; ++entry) {
        std::string_view line(*entry);
        auto eq = line.find('=');
        if (eq == std::string_view::npos || line.substr(0, prefix.size()) != prefix) {
            continue;
        }
        std::string key(line.substr(prefix.size(), eq - prefix.size()));
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (known_key(key)) {
            out[key] = std::string(line.substr(eq + 1));
        }
    }
    return out;
}

void ensure_data_dir(const Config& config)
{
    std::error_code ec;
    std::filesystem::create_directories(config.data_dir, ec);
    if (ec) {
        fail(ErrorCode::InvalidConfig, "data_dir: cannot create " + config.data_dir.string() + ": " + ec.message());
    }
    const auto probe = config.data_dir / ".write-probe";
    {
        std::ofstream out(probe);
        if (!out || !(out << "ok")) {
            fail(ErrorCode::InvalidConfig, "data_dir: " + config.data_dir.string() + " is not writable");
        }
    }
    std::filesystem::remove(probe, ec);
}

} // namespace orchid
