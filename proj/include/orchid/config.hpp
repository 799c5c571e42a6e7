#pragma once

#include "orchid/engine.hpp"
#include "orchid/provider.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace orchid {

struct Config {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "orchid-data";
    ProviderConfig provider;
    TemperatureTable temperatures;
    std::size_t max_concurrent_jobs = 4;
    std::chrono::milliseconds job_timeout{60000};
};

using SettingMap = std::map<std::string, std::string>;

/// Recognised keys, shared by flags (without the leading dashes), the config
/// file and, upper-cased with an ORCHID_ prefix, the environment.
inline constexpr const char* kSettingKeys[] = {
    "host", "port", "data_dir", "provider", "provider_endpoint", "provider_token_var",
    "provider_fixtures", "provider_timeout_ms", "provider_max_retries", "max_concurrent_jobs",
    "job_timeout_ms", "temperature_precise", "temperature_balanced", "temperature_creative",
};

/// Layers defaults < file < env < flags. The file is JSON with the same
/// keys, plus an optional "temperatures" object keyed by level name that
/// must name all three levels. Throws InvalidConfig naming the field.
Config load_config(const SettingMap& env, const SettingMap& flags,
                   const std::optional<std::filesystem::path>& file = std::nullopt);

/// Picks the ORCHID_* variables out of a process environment block.
SettingMap environment_settings(char** envp);

/// Creates the data directory if needed and checks it is writable.
void ensure_data_dir(const Config& config);

} // namespace orchid
