#pragma once

#include "orchid/prompt_assembler.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

namespace orchid {

struct CompletionParams {
    double temperature = 0.7;
    std::size_t max_output_tokens = 1024;
    std::chrono::milliseconds timeout{30000};
};

/// Generative back-end. Implementations must not touch workspace state.
class Provider {
public:
    virtual ~Provider() = default;

    /// Throws Error with Timeout, RemoteError or Cancelled.
    virtual std::string complete(const MetaPrompt& prompt, const CompletionParams& params,
                                 std::stop_token stop = {}) = 0;

    virtual std::string_view name() const noexcept = 0;
};

void validate_completion_params(const CompletionParams& params);

struct FixtureKey {
    TemplateId template_id;
    std::string digest; // "*" matches any digest of that template
    auto operator<=>(const FixtureKey&) const = default;
};

using FixtureTable = std::map<FixtureKey, std::string>;

/// Fixture file: one JSON object per line with "template", "digest" and
/// "response". Blank lines and lines starting with '#' are skipped.
FixtureTable parse_fixture_table(std::string_view text);
FixtureTable load_fixture_table(const std::filesystem::path& path);

/// Deterministic provider driven by a fixture table. Unknown prompts echo
/// their digest. Can be stalled to simulate a slow back-end.
class ScriptedProvider : public Provider {
public:
    explicit ScriptedProvider(FixtureTable fixtures = {});

    std::string complete(const MetaPrompt& prompt, const CompletionParams& params,
                         std::stop_token stop = {}) override;
    std::string_view name() const noexcept override { return "scripted"; }

    void set_response(TemplateId id, std::string digest, std::string response);

    /// Every call waits until release() (or timeout/cancel) while stalled.
    void stall();
    void release();

    std::size_t call_count() const noexcept { return calls_.load(); }
    std::vector<MetaPrompt> calls() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable_any released_;
    FixtureTable fixtures_;
    bool stalled_ = false;
    std::uint64_t release_epoch_ = 0;
    std::atomic<std::size_t> calls_{0};
    std::vector<MetaPrompt> history_;
};

enum class ProviderKind { Scripted, RemoteHttp };

std::string_view to_string(ProviderKind kind) noexcept;
std::optional<ProviderKind> provider_kind_from_string(std::string_view name) noexcept;

struct ProviderConfig {
    ProviderKind kind = ProviderKind::Scripted;
    std::string endpoint;
    std::string token_env_var = "ORCHID_PROVIDER_TOKEN";
    std::chrono::milliseconds timeout{30000};
    unsigned max_retries = 2;
    std::optional<std::filesystem::path> fixture_path;
};

/// POSTs {"prompt", "temperature", "max_tokens", "template"} as JSON to the
/// endpoint and reads {"text"} back. Connection failures and 5xx responses
/// are retried up to max_retries times.
class RemoteHttpProvider : public Provider {
public:
    explicit RemoteHttpProvider(ProviderConfig config);

    std::string complete(const MetaPrompt& prompt, const CompletionParams& params,
                         std::stop_token stop = {}) override;
    std::string_view name() const noexcept override { return "remote-http"; }

    std::size_t attempt_count() const noexcept { return attempts_.load(); }

private:
    ProviderConfig config_;
    std::string scheme_host_port_;
    std::string path_;
    std::atomic<std::size_t> attempts_{0};
};

std::shared_ptr<Provider> make_provider(const ProviderConfig& config);

struct TodoPlan {
    std::vector<std::string> tasks;
    std::vector<std::string> warnings;
};

inline constexpr std::size_t kMaxPlanItems = 5;

/// Drops blank lines, strips list markers, keeps the first five items.
/// Throws EmptyPlan when nothing usable remains.
TodoPlan parse_todo_response(std::string_view text);

} // namespace orchid
