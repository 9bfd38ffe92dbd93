#pragma once

// Canonical JSON encoding shared by save bodies and the wire protocol.
// Objects are key-sorted (nlohmann::json uses std::map), numbers are
// integers, output has no insignificant whitespace.

#include "cursed/rules.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace cursed {

using Json = nlohmann::json;

class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical text form of a JSON value.
std::string canonical(const Json& j);

namespace codec {

const Json& field(const Json& obj, std::string_view name);
std::string get_string(const Json& obj, std::string_view name);
long long get_int(const Json& obj, std::string_view name);
int get_int32(const Json& obj, std::string_view name);
std::uint64_t get_u64(const Json& obj, std::string_view name);
bool get_bool(const Json& obj, std::string_view name);
const Json& get_array(const Json& obj, std::string_view name);
const Json& get_object(const Json& obj, std::string_view name);

} // namespace codec

Json to_json(const Stats& s);
Json to_json(const Weapon& w);
Json to_json(const Combatant& c);
Json to_json(const AttackOutcome& o);
Json to_json(const LevelUpReport& r);
Json to_json(const BattleEvent& e);
Json to_json(const ExpAward& a);
Json to_json(const BattleResult& r);
Json to_json(const Battle& b);

Stats stats_from_json(const Json& j);
Weapon weapon_from_json(const Json& j);
Combatant combatant_from_json(const Json& j);
AttackOutcome outcome_from_json(const Json& j);
BattleEvent battle_event_from_json(const Json& j);
Battle battle_from_json(const Json& j);

} // namespace cursed
