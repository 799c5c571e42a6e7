#include "orchid/config.hpp"
#include "orchid/error.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>

using namespace orchid;

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

std::filesystem::path temp_file(const std::string& name, const std::string& content)
{
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path;
}

} // namespace

TEST_CASE("defaults")
{
    const auto config = load_config({}, {});
    CHECK(config.port == 8080);
    CHECK(config.host == "127.0.0.1");
    CHECK(config.provider.kind == ProviderKind::Scripted);
    CHECK(config.temperatures.at(TemperatureLevel::Precise) == 0.2);
    CHECK(config.temperatures.at(TemperatureLevel::Balanced) == 0.7);
    CHECK(config.temperatures.at(TemperatureLevel::Creative) == 1.0);
    CHECK(config.max_concurrent_jobs == 4);
}

TEST_CASE("precedence: flags over env over file over defaults")
{
    const auto file = temp_file("orchid-config-test.json",
                                R"({"port": 7000, "data_dir": "from-file", "host": "0.0.0.0", "job_timeout_ms": 1000})");
    const auto from_file = load_config({}, {}, file);
    CHECK(from_file.port == 7000);
    CHECK(from_file.data_dir == "from-file");
    CHECK(from_file.job_timeout == std::chrono::milliseconds(1000));

    const auto with_env = load_config({{"port", "9000"}, {"data_dir", "from-env"}}, {}, file);
    CHECK(with_env.port == 9000);
    CHECK(with_env.data_dir == "from-env");
    CHECK(with_env.host == "0.0.0.0");

    const auto with_flags = load_config({{"port", "9000"}}, {{"port", "9100"}}, file);
    CHECK(with_flags.port == 9100);
    std::filesystem::remove(file);
}

TEST_CASE("temperature table in a file must be complete")
{
    const auto good = temp_file("orchid-temps-good.json",
                                R"({"temperatures": {"Precise": 0.1, "Balanced": 0.5, "Creative": 1.5}})");
    CHECK(load_config({}, {}, good).temperatures.at(TemperatureLevel::Creative) == 1.5);
    const auto missing = temp_file("orchid-temps-bad.json", R"({"temperatures": {"Precise": 0.1, "Balanced": 0.5}})");
    try {
        load_config({}, {}, missing);
        FAIL("expected InvalidConfig");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidConfig);
        CHECK(std::string(e.what()).find("Creative") != std::string::npos);
    }
    std::filesystem::remove(good);
    std::filesystem::remove(missing);
}

TEST_CASE("invalid values name the field")
{
    for (const auto& [key, value] : std::vector<std::pair<std::string, std::string>>{
             {"port", "70000"}, {"port", "abc"}, {"provider", "magic"}, {"max_concurrent_jobs", "0"},
             {"temperature_precise", "3"}, {"nonsense", "1"}, {"host", ""}}) {
        CAPTURE(key);
        try {
            load_config({}, {{key, value}});
            FAIL("expected InvalidConfig");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidConfig);
            CHECK(std::string(e.what()).find(key) != std::string::npos);
        }
    }
    CHECK(code_of([] { load_config({{"provider", "remote-http"}}, {}); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { load_config({}, {}, std::filesystem::path("/nonexistent/orchid.json")); }) ==
          ErrorCode::InvalidConfig);
    const auto bad = temp_file("orchid-bad.json", "[1, 2]");
    CHECK(code_of([&] { load_config({}, {}, bad); }) == ErrorCode::InvalidConfig);
    std::filesystem::remove(bad);
}

TEST_CASE("environment block")
{
    std::string a = "ORCHID_PORT=9000";
    std::string b = "ORCHID_DATA_DIR=/tmp/x";
    std::string c = "PATH=/bin";
    std::string d = "ORCHID_PROVIDER_TOKEN=secret";
    std::vector<char*> env{a.data(), b.data(), c.data(), d.data(), nullptr};
    const auto settings = environment_settings(env.data());
    CHECK(settings == SettingMap{{"data_dir", "/tmp/x"}, {"port", "9000"}});
    CHECK(load_config(settings, {}).port == 9000);
    CHECK(environment_settings(nullptr).empty());
}

TEST_CASE("data directory must be writable")
{
    Config config;
    config.data_dir = std::filesystem::temp_directory_path() / "orchid-data-test";
    ensure_data_dir(config);
    CHECK(std::filesystem::is_directory(config.data_dir));
    std::filesystem::remove_all(config.data_dir);

    const auto file = temp_file("orchid-not-a-dir", "x");
    config.data_dir = file / "sub";
    CHECK(code_of([&] { ensure_data_dir(config); }) == ErrorCode::InvalidConfig);
    std::filesystem::remove(file);
}
