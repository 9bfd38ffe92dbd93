#include "cursed/codec.hpp"

#include <limits>

namespace cursed {

std::string canonical(const Json& j) { return j.dump(); }

namespace codec {

const Json& field(const Json& obj, std::string_view name) {
    if (!obj.is_object()) throw CodecError("expected an object");
    auto it = obj.find(name);
    if (it == obj.end()) throw CodecError("missing field '" + std::string(name) + "'");
    return *it;
}

std::string get_string(const Json& obj, std::string_view name) {
    const Json& v = field(obj, name);
    if (!v.is_string()) throw CodecError("field '" + std::string(name) + "' must be a string");
    return v.get<std::string>();
}

long long get_int(const Json& obj, std::string_view name) {
    const Json& v = field(obj, name);
    if (v.is_number_unsigned()) {
        auto u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(std::numeric_limits<long long>::max()))
            throw CodecError("field '" + std::string(name) + "' is out of range");
        return static_cast<long long>(u);
    }
    if (!v.is_number_integer()) throw CodecError("field '" + std::string(name) + "' must be an integer");
    return v.get<long long>();
}

int get_int32(const Json& obj, std::string_view name) {
    long long v = get_int(obj, name);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw CodecError("field '" + std::string(name) + "' is out of range");
    return static_cast<int>(v);
}

std::uint64_t get_u64(const Json& obj, std::string_view name) {
    const Json& v = field(obj, name);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    throw CodecError("field '" + std::string(name) + "' must be a non-negative integer");
}

bool get_bool(const Json& obj, std::string_view name) {
    const Json& v = field(obj, name);
    if (!v.is_boolean()) throw CodecError("field '" + std::string(name) + "' must be a boolean");
    return v.get<bool>();
}

const Json& get_array(const Json& obj, std::string_view name) {
    const Json& v = field(obj, name);
    if (!v.is_array()) throw CodecError("field '" + std::string(name) + "' must be an array");
    return v;
}

const Json& get_object(const Json& obj, std::string_view name) {
    const Json& v = field(obj, name);
    if (!v.is_object()) throw CodecError("field '" + std::string(name) + "' must be an object");
    return v;
}

} // namespace codec

using namespace codec;

Json to_json(const Stats& s) {
    return {{"max_hp", s.max_hp}, {"attack", s.attack},   {"magic", s.magic},
            {"defense", s.defense}, {"resist", s.resist}, {"speed", s.speed}};
}

Json to_json(const Weapon& w) {
    return {{"name", w.name}, {"attack_bonus", w.attack_bonus}, {"magic_bonus", w.magic_bonus}};
}

Json to_json(const Combatant& c) {
    Json j{{"id", c.id.value},
           {"archetype", to_string(c.archetype)},
           {"name", c.name},
           {"level", c.level},
           {"exp", c.exp},
           {"hp", c.hp},
           {"stats", to_json(c.stats)},
           {"side", to_string(c.side)}};
    j["weapon"] = c.weapon ? to_json(*c.weapon) : Json(nullptr);
    return j;
}

Json to_json(const AttackOutcome& o) {
    return {{"kind", to_string(o.kind)},
            {"damage", o.damage},
            {"defender_hp_after", o.defender_hp_after},
            {"defeated", o.defeated}};
}

Json to_json(const LevelUpReport& r) {
    return {{"levels_gained", r.levels_gained}, {"new_level", r.new_level}, {"exp_remainder", r.exp_remainder}};
}

Json to_json(const BattleEvent& e) {
    return {{"round", e.round},
            {"attacker", e.attacker.value},
            {"defender", e.defender.value},
            {"outcome", to_json(e.outcome)}};
}

Json to_json(const ExpAward& a) {
    return {{"id", a.id.value}, {"exp_gained", a.exp_gained}, {"report", to_json(a.report)}};
}

Json to_json(const BattleResult& r) {
    Json survivors = Json::array();
    for (const auto& c : r.survivors) survivors.push_back(to_json(c));
    Json awards = Json::array();
    for (const auto& a : r.exp_awards) awards.push_back(to_json(a));
    Json transcript = Json::array();
    for (const auto& e : r.transcript) transcript.push_back(to_json(e));
    return {{"winner", to_string(r.winner)},
            {"turns", r.turns},
            {"survivors", std::move(survivors)},
            {"exp_awards", std::move(awards)},
            {"transcript", std::move(transcript)}};
}

Json to_json(const Battle& b) {
    Json combatants = Json::array();
    for (const auto& c : b.combatants) combatants.push_back(to_json(c));
    Json pending = Json::array();
    for (auto id : b.pending) pending.push_back(id.value);
    Json transcript = Json::array();
    for (const auto& e : b.transcript) transcript.push_back(to_json(e));
    Json j{{"combatants", std::move(combatants)},
           {"seed", b.seed},
           {"round", b.round},
           {"pending", std::move(pending)},
           {"transcript", std::move(transcript)}};
    j["winner"] = b.winner ? Json(to_string(*b.winner)) : Json(nullptr);
    return j;
}

Stats stats_from_json(const Json& j) {
    return {get_int32(j, "max_hp"), get_int32(j, "attack"), get_int32(j, "magic"),
            get_int32(j, "defense"), get_int32(j, "resist"), get_int32(j, "speed")};
}

Weapon weapon_from_json(const Json& j) {
    return {get_string(j, "name"), get_int32(j, "attack_bonus"), get_int32(j, "magic_bonus")};
}

namespace {

CombatantId id_from(const Json& j, std::string_view name) {
    auto v = get_u64(j, name);
    if (v > std::numeric_limits<std::uint32_t>::max()) throw CodecError("combatant id out of range");
    return CombatantId{static_cast<std::uint32_t>(v)};
}

CombatantId id_value(const Json& v) {
    if (!v.is_number_integer() || v.get<long long>() < 0 ||
        v.get<long long>() > std::numeric_limits<std::uint32_t>::max())
        throw CodecError("combatant id must be a 32-bit unsigned integer");
    return CombatantId{v.get<std::uint32_t>()};
}

} // namespace

Combatant combatant_from_json(const Json& j) {
    Combatant c;
    c.id = id_from(j, "id");
    auto arch = parse_archetype(get_string(j, "archetype"));
    if (!arch) throw CodecError("unknown archetype");
    c.archetype = *arch;
    c.name = get_string(j, "name");
    c.level = get_int32(j, "level");
    c.exp = get_int32(j, "exp");
    c.hp = get_int32(j, "hp");
    c.stats = stats_from_json(get_object(j, "stats"));
    auto side = parse_side(get_string(j, "side"));
    if (!side) throw CodecError("unknown side");
    c.side = *side;
    const Json& w = field(j, "weapon");
    if (!w.is_null()) c.weapon = weapon_from_json(w);
    return c;
}

AttackOutcome outcome_from_json(const Json& j) {
    AttackOutcome o;
    auto kind = parse_attack_kind(get_string(j, "kind"));
    if (!kind) throw CodecError("unknown attack kind");
    o.kind = *kind;
    o.damage = get_int32(j, "damage");
    o.defender_hp_after = get_int32(j, "defender_hp_after");
    o.defeated = get_bool(j, "defeated");
    return o;
}

BattleEvent battle_event_from_json(const Json& j) {
    BattleEvent e;
    auto round = get_u64(j, "round");
    if (round > std::numeric_limits<std::uint32_t>::max()) throw CodecError("round out of range");
    e.round = static_cast<std::uint32_t>(round);
    e.attacker = id_from(j, "attacker");
    e.defender = id_from(j, "defender");
    e.outcome = outcome_from_json(get_object(j, "outcome"));
    return e;
}

Battle battle_from_json(const Json& j) {
    Battle b;
    for (const Json& c : get_array(j, "combatants")) b.combatants.push_back(combatant_from_json(c));
    b.seed = get_u64(j, "seed");
    auto round = get_u64(j, "round");
    if (round > std::numeric_limits<std::uint32_t>::max()) throw CodecError("round out of range");
    b.round = static_cast<std::uint32_t>(round);
    for (const Json& id : get_array(j, "pending")) b.pending.push_back(id_value(id));
    for (const Json& e : get_array(j, "transcript")) b.transcript.push_back(battle_event_from_json(e));
    const Json& w = field(j, "winner");
    if (!w.is_null()) {
        if (!w.is_string()) throw CodecError("field 'winner' must be a string or null");
        auto side = parse_side(w.get<std::string>());
        if (!side) throw CodecError("unknown winner side");
        b.winner = *side;
    }
    for (auto id : b.pending)
        if (!b.find(id)) throw CodecError("pending actor is not in the battle");
    return b;
}

} // namespace cursed
