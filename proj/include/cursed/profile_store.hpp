#pragma once

// Durable player profiles: an append-only log of JSON lines keyed by player
// name, replayed on open and compacted when it grows. Single writer.

#include "cursed/codec.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

namespace cursed {

struct PlayerProfile {
    std::string name;
    long long total_exp = 0;
    int level = 1;
    long long monsters_defeated = 0;
    friend bool operator==(const PlayerProfile&, const PlayerProfile&) = default;
};

struct ProfileDelta {
    std::string name;
    long long exp = 0;
    long long monsters_defeated = 0;
};

Json to_json(const PlayerProfile& p);
PlayerProfile profile_from_json(const Json& j);

/// EXP within the current level for a profile (total minus the level floor).
int exp_into_level(const PlayerProfile& p) noexcept;

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ProfileStore {
public:
    /// Opens (creating if needed) the log at `path`. Throws StoreError
    /// (StoreUnavailable) if the file cannot be opened or is corrupt.
    explicit ProfileStore(std::filesystem::path path);
    ~ProfileStore();

    ProfileStore(const ProfileStore&) = delete;
    ProfileStore& operator=(const ProfileStore&) = delete;

    std::optional<PlayerProfile> find(const std::string& name) const;
    /// Stored profile, or a fresh level-1 profile (not written).
    PlayerProfile get_or_default(const std::string& name) const;

    /// Durable upsert: applies the delta, fsyncs, returns the new profile.
    PlayerProfile record_result(const ProfileDelta& delta);

    /// Rewrites the log with one line per profile.
    void compact();

    std::size_t size() const;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    void append_line(const std::string& line);
    void open_for_append();
    void compact_locked();

    std::filesystem::path path_;
    std::map<std::string, PlayerProfile> profiles_;
    std::size_t log_lines_ = 0;
    int fd_ = -1;
    mutable std::mutex mu_;
};

} // namespace cursed
