#include "cursed/room.hpp"

#include <algorithm>

namespace cursed {

std::string_view to_string(RoomPhase p) noexcept {
    switch (p) {
    case RoomPhase::Lobby: return "Lobby";
    case RoomPhase::Fighting: return "Fighting";
    case RoomPhase::WaveCleared: return "WaveCleared";
    case RoomPhase::Closed: return "Closed";
    }
    return "?";
}

Room make_room(std::string id, std::uint64_t seed) {
    Room r;
    r.id = std::move(id);
    r.seed = seed;
    return r;
}

Json room_snapshot(const Room& room) {
    Json players = Json::array();
    for (const auto& [_, c] : room.players) players.push_back(to_json(c));
    Json monsters = Json::array();
    for (const auto& [_, c] : room.monsters) monsters.push_back(to_json(c));
    return {{"id", room.id},
            {"phase", to_string(room.phase)},
            {"wave", room.wave},
            {"tick", room.tick},
            {"players", std::move(players)},
            {"monsters", std::move(monsters)}};
}

namespace {

Outgoing to_all(MsgType t, Json body) { return Outgoing{std::nullopt, make_message(t, std::move(body))}; }

Outgoing room_state(const Room& room) { return to_all(MsgType::RoomState, {{"room", room_snapshot(room)}}); }

bool any_alive(const std::map<std::uint32_t, Combatant>& m) {
    return std::any_of(m.begin(), m.end(), [](const auto& kv) { return kv.second.alive(); });
}

void spawn_wave(Room& room) {
    room.monsters.clear();
    room.damagers.clear();
    room.wave_awards.clear();
    const int count = room.wave + 1;
    for (int i = 0; i < count; ++i) {
        const std::uint32_t id = room.next_monster_id++;
        std::string name = archetype_display_name(Archetype::Monster, room.wave) + " #" + std::to_string(i + 1);
        room.monsters.emplace(id, make_combatant(CombatantId{id}, Archetype::Monster, Side::Enemy, room.wave, std::move(name)));
    }
    for (auto& [_, p] : room.players) p.hp = p.stats.max_hp;
    room.phase = RoomPhase::Fighting;
}

Json hp_map(const Room& room) {
    Json hp = Json::object();
    for (const auto& [id, c] : room.players) hp[std::to_string(id)] = c.hp;
    for (const auto& [id, c] : room.monsters) hp[std::to_string(id)] = c.hp;
    return hp;
}

Json attack_event(const Combatant& attacker, const Combatant& target, const AttackOutcome& out) {
    return {{"type", "attack"},
            {"attacker", attacker.id.value},
            {"target", target.id.value},
            {"kind", to_string(out.kind)},
            {"damage", out.damage},
            {"hp_after", out.defender_hp_after},
            {"defeated", out.defeated}};
}

Json invalid_event(const QueuedAction& qa, std::string_view reason) {
    return {{"type", "invalid"}, {"player", qa.player}, {"target", qa.action.target.value}, {"reason", reason}};
}

} // namespace

RoomUpdate join_room(Room room, const PlayerProfile& profile, std::uint32_t connection) {
    if (room.phase == RoomPhase::Closed) throw NetError(NetErrc::RoomClosed, "room '" + room.id + "' is closed");
    for (const auto& [id, c] : room.players)
        if (c.name == profile.name || id == connection)
            throw NetError(NetErrc::NameTaken, "name '" + profile.name + "' is already in room '" + room.id + "'");

    Combatant c = make_combatant(CombatantId{connection}, Archetype::Prince, Side::Player, profile.level, profile.name);
    c.exp = exp_into_level(profile);
    room.players.emplace(connection, std::move(c));

    RoomUpdate up{std::move(room), {}, {}};
    up.broadcasts.push_back(room_state(up.room));
    return up;
}

RoomUpdate leave_room(Room room, std::uint32_t connection) {
    room.players.erase(connection);
    for (auto& [_, who] : room.damagers) who.erase(connection);
    room.wave_awards.erase(connection);
    RoomUpdate up{std::move(room), {}, {}};
    if (up.room.players.empty()) {
        up.room.phase = RoomPhase::Closed;
        up.room.monsters.clear();
        return up;
    }
    up.broadcasts.push_back(room_state(up.room));
    return up;
}

RoomUpdate request_start(Room room) {
    RoomUpdate up{std::move(room), {}, {}};
    Room& r = up.room;
    if (r.players.empty()) return up;
    if (r.phase == RoomPhase::Lobby || r.phase == RoomPhase::WaveCleared) {
        spawn_wave(r);
        up.broadcasts.push_back(room_state(r));
    }
    return up;
}

RoomUpdate apply_tick(Room room, const std::vector<QueuedAction>& queued) {
    if (room.phase != RoomPhase::Fighting)
        throw NetError(NetErrc::NotFighting, "room '" + room.id + "' is not fighting");

    RoomUpdate up{std::move(room), {}, {}};
    Room& r = up.room;
    const std::uint64_t tick = r.tick + 1;
    Json events = Json::array();

    // (1) player intents in arrival order, one per player.
    std::set<std::uint32_t> acted;
    std::vector<std::uint32_t> fallen;
    for (const QueuedAction& qa : queued) {
        auto p = r.players.find(qa.player);
        if (p == r.players.end()) continue;
        if (!p->second.alive()) {
            events.push_back(invalid_event(qa, "actor_defeated"));
            continue;
        }
        if (!acted.insert(qa.player).second) {
            events.push_back(invalid_event(qa, "already_acted"));
            continue;
        }
        auto m = r.monsters.find(qa.action.target.value);
        if (m == r.monsters.end() || !m->second.alive()) {
            events.push_back(invalid_event(qa, "bad_target"));
            continue;
        }
        const AttackOutcome out = resolve_attack(p->second, m->second, qa.action.kind);
        m->second.hp = out.defender_hp_after;
        r.damagers[m->first].insert(qa.player);
        events.push_back(attack_event(p->second, m->second, out));
        if (out.defeated) fallen.push_back(m->first);
    }

    // (2) every surviving monster acts once.
    for (auto& [id, monster] : r.monsters) {
        if (!monster.alive()) continue;
        std::vector<CombatantId> targets;
        for (const auto& [pid, p] : r.players)
            if (p.alive()) targets.push_back(p.id);
        if (targets.empty()) break;
        const CombatantId target = pick_target(r.seed, tick, monster.id, std::move(targets));
        Combatant& victim = r.players.at(target.value);
        const AttackOutcome out = resolve_attack(monster, victim, monster_attack_kind(monster));
        victim.hp = out.defender_hp_after;
        events.push_back(attack_event(monster, victim, out));
    }

    // (3) full EXP for every player who damaged a fallen monster.
    std::sort(fallen.begin(), fallen.end());
    std::map<std::uint32_t, ProfileDelta> deltas;
    for (std::uint32_t mid : fallen) {
        const int level = r.monsters.at(mid).level;
        for (std::uint32_t pid : r.damagers[mid]) {
            auto p = r.players.find(pid);
            if (p == r.players.end()) continue;
            Awarded a = award_exp(std::move(p->second), level);
            p->second = std::move(a.combatant);
            r.wave_awards[pid] += exp_for_kill(level);
            ProfileDelta& d = deltas[pid];
            d.name = p->second.name;
            d.exp += exp_for_kill(level);
            d.monsters_defeated += 1;
            events.push_back({{"type", "exp"},
                              {"player", pid},
                              {"exp", exp_for_kill(level)},
                              {"level", a.report.new_level},
                              {"levels_gained", a.report.levels_gained}});
        }
    }
    for (auto& [_, d] : deltas) up.deltas.push_back(std::move(d));

    r.tick = tick;
    up.broadcasts.push_back(to_all(MsgType::StateDelta, {{"tick", tick}, {"events", std::move(events)}, {"hp", hp_map(r)}}));
    for (std::uint32_t mid : fallen) {
        r.monsters.erase(mid);
        r.damagers.erase(mid);
    }

    // (4) wave cleared, (5) party wiped.
    if (!any_alive(r.monsters)) {
        Json awards = Json::array();
        for (const auto& [pid, exp] : r.wave_awards)
            if (auto p = r.players.find(pid); p != r.players.end())
                awards.push_back({{"player_id", pid}, {"exp_gained", exp}, {"level", p->second.level}});
        up.broadcasts.push_back(to_all(MsgType::WaveCleared, {{"wave", r.wave}, {"awards", std::move(awards)}}));
        r.phase = RoomPhase::WaveCleared;
        r.monsters.clear();
        ++r.wave;
    } else if (!any_alive(r.players)) {
        up.broadcasts.push_back(to_all(MsgType::Defeat, Json::object()));
        r.phase = RoomPhase::Lobby;
        r.monsters.clear();
        r.damagers.clear();
        r.wave_awards.clear();
        r.wave = 1;
        for (auto& [_, p] : r.players) p.hp = p.stats.max_hp;
        up.broadcasts.push_back(room_state(r));
    }
    return up;
}

// ---- replay ----

std::string broadcast_text(const Outgoing& o) {
    Json j{{"msg", Json::parse(encode_message(o.message))}};
    j["to"] = o.to ? Json(*o.to) : Json(nullptr);
    return canonical(j);
}

std::vector<std::string> replay_room_log(const RoomLog& log) {
    Room room = make_room(log.room_id, log.seed);
    std::vector<std::string> out;
    for (const RoomLogEntry& entry : log.entries) {
        RoomUpdate up;
        if (const auto* j = std::get_if<LogJoin>(&entry))
            up = join_room(std::move(room), j->profile, j->connection);
        else if (const auto* l = std::get_if<LogLeave>(&entry))
            up = leave_room(std::move(room), l->connection);
        else if (std::holds_alternative<LogStart>(entry))
            up = request_start(std::move(room));
        else
            up = apply_tick(std::move(room), std::get<LogTick>(entry).actions);
        room = std::move(up.room);
        for (const Outgoing& o : up.broadcasts) out.push_back(broadcast_text(o));
    }
    return out;
}

} // namespace cursed
