#pragma once

#include "orchid/config.hpp"
#include "orchid/engine.hpp"

#include <chrono>
#include <memory>
#include <string>

namespace orchid {

inline constexpr std::string_view kVersion = "0.1.0";

/// HTTP/1.1 JSON API over one workspace. start() binds synchronously and
/// serves on a background thread.
class Service {
public:
    /// Throws BindError when the port cannot be bound. Uses the configured
    /// provider unless one is supplied.
    static std::unique_ptr<Service> start(const Config& config, std::shared_ptr<Provider> provider = nullptr);

    ~Service();

    int port() const noexcept;
    DocumentStore& store() noexcept;
    Engine& engine() noexcept;
    ProvenanceStore& provenance() noexcept;

    /// Stops listening, drains jobs up to `drain`, persists the workspace.
    void shutdown(std::chrono::milliseconds drain = std::chrono::seconds(5));

    /// Blocks until shutdown() is called from another thread.
    void wait();

    struct Impl;

private:
    explicit Service(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

} // namespace orchid
