#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

namespace orchid {

/// Opaque string identifier, distinguished at compile time by Tag.
template <typename Tag>
class Id {
public:
    Id() = default;
    explicit Id(std::string value) : value_(std::move(value)) {}

    const std::string& value() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    auto operator<=>(const Id&) const = default;

private:
    std::string value_;
};

struct DocumentTag;
struct BlockTag;
struct TaskTag;
struct JobTag;
struct RecordTag;

using DocumentId = Id<DocumentTag>;
using BlockId = Id<BlockTag>;
using TaskId = Id<TaskTag>;
using JobId = Id<JobTag>;
using RecordId = Id<RecordTag>;

using Revision = std::uint64_t;

// URL-safe ids of the form "<prefix>-<12 hex digits>". Seedable so tests can
// reproduce a workspace exactly.
class IdGenerator {
public:
    IdGenerator();
    explicit IdGenerator(std::uint64_t seed) : rng_(seed) {}

    std::string next(std::string_view prefix);

private:
    std::mutex mutex_;
    std::mt19937_64 rng_;
};

} // namespace orchid

template <typename Tag>
struct std::hash<orchid::Id<Tag>> {
    std::size_t operator()(const orchid::Id<Tag>& id) const noexcept
    {
        return std::hash<std::string>{}(id.value());
    }
};
