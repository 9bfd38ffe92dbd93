#pragma once

// Wire protocol: one JSON object per WebSocket text frame. Every message
// carries "t" (type tag) and "seq"; the remaining fields are fixed per type
// and checked strictly in both directions.

#include "cursed/codec.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cursed {

enum class MsgType {
    Hello,
    Welcome,
    Join,
    RoomState,
    Start,
    Action,
    StateDelta,
    WaveCleared,
    Defeat,
    ProtocolError,
    Bye,
    SpStart,
    SpInput,
    SpView,
    SpError,
};

std::string_view to_string(MsgType t) noexcept;
std::optional<MsgType> parse_msg_type(std::string_view s) noexcept;

struct NetMessage {
    MsgType type = MsgType::Hello;
    std::uint64_t seq = 0;
    /// Per-type fields (everything except "t" and "seq").
    Json body = Json::object();

    friend bool operator==(const NetMessage&, const NetMessage&) = default;
};

enum class NetErrc { MalformedMessage, UnknownType, NameTaken, RoomClosed, NotFighting };

class NetError : public std::runtime_error {
public:
    NetError(NetErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    NetErrc code() const noexcept { return code_; }

private:
    NetErrc code_;
};

/// Throws NetError(MalformedMessage) if the body does not match the schema.
std::string encode_message(const NetMessage& m);

/// Strict decode: unknown "t" is UnknownType; anything else wrong (not JSON,
/// missing or extra fields, wrong types) is MalformedMessage naming the field.
NetMessage decode_message(std::string_view bytes);

/// Throws NetError(MalformedMessage) describing the first schema violation.
void check_schema(MsgType type, const Json& body);

NetMessage make_message(MsgType type, Json body = Json::object(), std::uint64_t seq = 0);

} // namespace cursed
