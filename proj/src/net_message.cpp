#include "cursed/net_message.hpp"

#include <array>
#include <span>
#include <utility>

namespace cursed {

namespace {

enum class Kind { String, UInt, Object, Array };

struct FieldSpec {
    std::string_view name;
    Kind kind;
};

constexpr std::array kNames{
    std::pair{MsgType::Hello, std::string_view{"hello"}},
    std::pair{MsgType::Welcome, std::string_view{"welcome"}},
    std::pair{MsgType::Join, std::string_view{"join"}},
    std::pair{MsgType::RoomState, std::string_view{"room_state"}},
    std::pair{MsgType::Start, std::string_view{"start"}},
    std::pair{MsgType::Action, std::string_view{"action"}},
    std::pair{MsgType::StateDelta, std::string_view{"state_delta"}},
    std::pair{MsgType::WaveCleared, std::string_view{"wave_cleared"}},
    std::pair{MsgType::Defeat, std::string_view{"defeat"}},
    std::pair{MsgType::ProtocolError, std::string_view{"protocol_error"}},
    std::pair{MsgType::Bye, std::string_view{"bye"}},
    std::pair{MsgType::SpStart, std::string_view{"sp_start"}},
    std::pair{MsgType::SpInput, std::string_view{"sp_input"}},
    std::pair{MsgType::SpView, std::string_view{"sp_view"}},
    std::pair{MsgType::SpError, std::string_view{"sp_error"}},
};

constexpr FieldSpec kHello[] = {{"name", Kind::String}};
constexpr FieldSpec kWelcome[] = {{"player_id", Kind::UInt}, {"profile", Kind::Object}};
constexpr FieldSpec kJoin[] = {{"room", Kind::String}};
constexpr FieldSpec kRoomState[] = {{"room", Kind::Object}};
constexpr FieldSpec kAction[] = {{"kind", Kind::String}, {"target", Kind::UInt}};
constexpr FieldSpec kStateDelta[] = {{"tick", Kind::UInt}, {"events", Kind::Array}, {"hp", Kind::Object}};
constexpr FieldSpec kWaveCleared[] = {{"wave", Kind::UInt}, {"awards", Kind::Array}};
constexpr FieldSpec kReason[] = {{"reason", Kind::String}};
constexpr FieldSpec kSpStart[] = {{"seed", Kind::UInt}};
constexpr FieldSpec kSpInput[] = {{"input", Kind::String}};
constexpr FieldSpec kSpView[] = {{"view", Kind::Object}, {"events", Kind::Array}};

std::span<const FieldSpec> schema(MsgType t) {
    switch (t) {
    case MsgType::Hello: return kHello;
    case MsgType::Welcome: return kWelcome;
    case MsgType::Join: return kJoin;
    case MsgType::RoomState: return kRoomState;
    case MsgType::Action: return kAction;
    case MsgType::StateDelta: return kStateDelta;
    case MsgType::WaveCleared: return kWaveCleared;
    case MsgType::ProtocolError:
    case MsgType::SpError: return kReason;
    case MsgType::SpStart: return kSpStart;
    case MsgType::SpInput: return kSpInput;
    case MsgType::SpView: return kSpView;
    case MsgType::Start:
    case MsgType::Defeat:
    case MsgType::Bye: return {};
    }
    return {};
}

bool matches(const Json& v, Kind k) {
    switch (k) {
    case Kind::String: return v.is_string();
    case Kind::UInt: return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    case Kind::Object: return v.is_object();
    case Kind::Array: return v.is_array();
    }
    return false;
}

std::string_view kind_name(Kind k) {
    switch (k) {
    case Kind::String: return "a string";
    case Kind::UInt: return "a non-negative integer";
    case Kind::Object: return "an object";
    case Kind::Array: return "an array";
    }
    return "?";
}

[[noreturn]] void malformed(const std::string& what) { throw NetError(NetErrc::MalformedMessage, what); }

} // namespace

std::string_view to_string(MsgType t) noexcept {
    for (const auto& [type, name] : kNames)
        if (type == t) return name;
    return "?";
}

std::optional<MsgType> parse_msg_type(std::string_view s) noexcept {
    for (const auto& [type, name] : kNames)
        if (name == s) return type;
    return std::nullopt;
}

void check_schema(MsgType type, const Json& body) {
    if (!body.is_object()) malformed("message body must be an object");
    const auto fields = schema(type);
    for (const FieldSpec& f : fields) {
        auto it = body.find(f.name);
        if (it == body.end()) malformed(std::string(to_string(type)) + ": missing field '" + std::string(f.name) + "'");
        if (!matches(*it, f.kind))
            malformed(std::string(to_string(type)) + ": field '" + std::string(f.name) + "' must be " +
                      std::string(kind_name(f.kind)));
    }
    for (const auto& [key, _] : body.items()) {
        bool known = false;
        for (const FieldSpec& f : fields) known = known || f.name == key;
        if (!known) malformed(std::string(to_string(type)) + ": unexpected field '" + key + "'");
    }
    if (type == MsgType::Action) {
        const auto kind = body.at("kind").get<std::string>();
        if (kind != "physical" && kind != "magic") malformed("action: field 'kind' must be \"physical\" or \"magic\"");
    }
}

std::string encode_message(const NetMessage& m) {
    check_schema(m.type, m.body);
    Json j = m.body;
    j["t"] = to_string(m.type);
    j["seq"] = m.seq;
    return canonical(j);
}

NetMessage decode_message(std::string_view bytes) {
    if (bytes.empty()) malformed("empty message");
    Json j = Json::parse(bytes.begin(), bytes.end(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) malformed("message is not valid JSON");
    if (!j.is_object()) malformed("message must be a JSON object");
    auto t = j.find("t");
    if (t == j.end()) malformed("missing field 't'");
    if (!t->is_string()) malformed("field 't' must be a string");
    auto type = parse_msg_type(t->get<std::string>());
    if (!type) throw NetError(NetErrc::UnknownType, "unknown message type '" + t->get<std::string>() + "'");
    auto seq = j.find("seq");
    if (seq == j.end()) malformed(std::string(to_string(*type)) + ": missing field 'seq'");
    if (!matches(*seq, Kind::UInt)) malformed("field 'seq' must be a non-negative integer");

    NetMessage m;
    m.type = *type;
    m.seq = seq->get<std::uint64_t>();
    j.erase("t");
    j.erase("seq");
    check_schema(m.type, j);
    m.body = std::move(j);
    return m;
}

NetMessage make_message(MsgType type, Json body, std::uint64_t seq) {
    return NetMessage{type, seq, body.is_null() ? Json::object() : std::move(body)};
}

} // namespace cursed
