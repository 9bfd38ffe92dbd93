#pragma once

// Co-op monster arena. A Room is a plain value; every mutation is a pure
// function returning the next Room plus the messages to broadcast, so a
// recorded input log replays to identical output.

#include "cursed/net_message.hpp"
#include "cursed/profile_store.hpp"
#include "cursed/rules.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace cursed {

enum class RoomPhase { Lobby, Fighting, WaveCleared, Closed };

std::string_view to_string(RoomPhase p) noexcept;

inline constexpr std::uint32_t kFirstMonsterId = 1'000'000;

struct Room {
    std::string id;
    /// Keyed by player id (the connection id).
    std::map<std::uint32_t, Combatant> players;
    std::map<std::uint32_t, Combatant> monsters;
    int wave = 1;
    std::uint64_t tick = 0;
    std::uint64_t seed = 0;
    RoomPhase phase = RoomPhase::Lobby;
    /// Monster id -> players who damaged it during the current wave.
    std::map<std::uint32_t, std::set<std::uint32_t>> damagers;
    /// EXP granted per player during the current wave.
    std::map<std::uint32_t, long long> wave_awards;
    std::uint32_t next_monster_id = kFirstMonsterId;

    friend bool operator==(const Room&, const Room&) = default;
};

struct QueuedAction {
    std::uint32_t player = 0;
    Action action;
    friend bool operator==(const QueuedAction&, const QueuedAction&) = default;
};

/// A message for every player in the room, or for one player.
struct Outgoing {
    std::optional<std::uint32_t> to;
    NetMessage message;
    friend bool operator==(const Outgoing&, const Outgoing&) = default;
};

struct RoomUpdate {
    Room room;
    std::vector<Outgoing> broadcasts;
    std::vector<ProfileDelta> deltas;
};

Room make_room(std::string id, std::uint64_t seed);

Json room_snapshot(const Room& room);

/// Adds a player at their profile's level and full hp. Throws
/// NetError(NameTaken) or NetError(RoomClosed).
RoomUpdate join_room(Room room, const PlayerProfile& profile, std::uint32_t connection);

/// Removes a player; an emptied room is Closed.
RoomUpdate leave_room(Room room, std::uint32_t connection);

/// Lobby or WaveCleared: spawns the next wave and starts Fighting. No-op
/// while already Fighting.
RoomUpdate request_start(Room room);

/// One authoritative tick. Throws NetError(NotFighting) outside Fighting.
RoomUpdate apply_tick(Room room, const std::vector<QueuedAction>& queued);

// ---- recording and replay ----

struct LogJoin {
    PlayerProfile profile;
    std::uint32_t connection = 0;
};
struct LogLeave {
    std::uint32_t connection = 0;
};
struct LogStart {};
struct LogTick {
    std::vector<QueuedAction> actions;
};

using RoomLogEntry = std::variant<LogJoin, LogLeave, LogStart, LogTick>;

struct RoomLog {
    std::string room_id;
    std::uint64_t seed = 0;
    std::vector<RoomLogEntry> entries;
};

/// Canonical text of one broadcast (recipient + message without seq).
std::string broadcast_text(const Outgoing& o);

/// Re-runs a log from a fresh room; returns every broadcast in order.
std::vector<std::string> replay_room_log(const RoomLog& log);

} // namespace cursed
