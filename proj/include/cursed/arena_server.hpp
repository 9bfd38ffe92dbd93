#pragma once

// WebSocket arena server. One io_context thread owns every room, so room
// mutations are serialized without locks; a timer drives the ticks.

#include "cursed/net_message.hpp"
#include "cursed/room.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cursed {

struct ServerConfig {
    std::uint16_t port = 0; ///< 0 picks a free port
    std::filesystem::path db = "profiles.db";
    /// 0 disables the timer; ticks then only happen via advance_tick().
    int tick_ms = 500;
    std::optional<std::filesystem::path> static_dir;
    std::uint64_t seed = 0;
};

class ArenaServer {
public:
    explicit ArenaServer(ServerConfig cfg);
    ~ArenaServer();

    ArenaServer(const ArenaServer&) = delete;
    ArenaServer& operator=(const ArenaServer&) = delete;

    /// Bound port (valid after construction).
    std::uint16_t port() const noexcept;

    /// Runs the event loop on the calling thread until stop().
    void run();
    /// Runs the event loop on a background thread.
    void start();
    void stop();

    /// Ticks every room once, as the timer would. Blocks until done.
    void advance_tick();

    /// Input log and broadcasts of every room so far.
    struct Recording {
        RoomLog log;
        std::vector<std::string> broadcasts;
    };
    std::map<std::string, Recording> recordings();

    std::optional<Room> room(const std::string& id);
    /// Actions waiting for the next tick of a room.
    std::size_t queued_actions(const std::string& room);

private:
    struct Impl;
    friend struct Conn;
    friend struct HttpSession;
    std::unique_ptr<Impl> impl_;
};

/// Blocking client, for tests and tools.
class ArenaClient {
public:
    ArenaClient(const std::string& host, std::uint16_t port, const std::string& target = "/");
    ~ArenaClient();

    ArenaClient(const ArenaClient&) = delete;
    ArenaClient& operator=(const ArenaClient&) = delete;

    /// Sends with the next outgoing seq.
    void send(MsgType type, Json body = Json::object());
    /// Sends raw text as-is.
    void send_raw(const std::string& text);
    /// Next message; throws on close or on timeout.
    NetMessage receive(std::chrono::milliseconds timeout = std::chrono::seconds(10));
    /// Skips messages until one of `type` arrives.
    NetMessage receive_until(MsgType type, std::chrono::milliseconds timeout = std::chrono::seconds(10));
    /// True once the server has closed the connection.
    bool closed();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Plain GET; returns (status, body).
std::pair<int, std::string> http_get(const std::string& host, std::uint16_t port, const std::string& target);

} // namespace cursed
