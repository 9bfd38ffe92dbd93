#include "cursed/rules.hpp"

#include "cursed/rng.hpp"

#include <algorithm>

namespace cursed {

std::string_view to_string(Archetype a) noexcept {
    switch (a) {
    case Archetype::Prince: return "Prince";
    case Archetype::Monster: return "Monster";
    case Archetype::Witch: return "Witch";
    }
    return "?";
}

std::string_view to_string(Side s) noexcept { return s == Side::Player ? "Player" : "Enemy"; }

std::string_view to_string(AttackKind k) noexcept {
    return k == AttackKind::Physical ? "physical" : "magic";
}

std::optional<Archetype> parse_archetype(std::string_view s) noexcept {
    if (s == "Prince") return Archetype::Prince;
    if (s == "Monster") return Archetype::Monster;
    if (s == "Witch") return Archetype::Witch;
    return std::nullopt;
}

std::optional<Side> parse_side(std::string_view s) noexcept {
    if (s == "Player") return Side::Player;
    if (s == "Enemy") return Side::Enemy;
    return std::nullopt;
}

std::optional<AttackKind> parse_attack_kind(std::string_view s) noexcept {
    if (s == "physical") return AttackKind::Physical;
    if (s == "magic") return AttackKind::Magic;
    return std::nullopt;
}

int Combatant::effective_attack() const noexcept {
    return stats.attack + (weapon ? weapon->attack_bonus : 0);
}

int Combatant::effective_magic() const noexcept {
    return stats.magic + (weapon ? weapon->magic_bonus : 0);
}

Stats base_stats(Archetype a) noexcept {
    switch (a) {
    case Archetype::Prince: return {30, 8, 6, 3, 2, 5};
    case Archetype::Monster: return {20, 6, 2, 1, 1, 3};
    case Archetype::Witch: return {40, 3, 4, 2, 4, 4};
    }
    return {};
}

Stats level_growth(Archetype a) noexcept {
    switch (a) {
    case Archetype::Prince: return {10, 2, 2, 1, 1, 0};
    case Archetype::Monster: return {5, 1, 0, 0, 0, 0};
    case Archetype::Witch: return {5, 1, 1, 1, 1, 0};
    }
    return {};
}

namespace {

Stats grow(Stats s, const Stats& g, int times) noexcept {
    s.max_hp += g.max_hp * times;
    s.attack += g.attack * times;
    s.magic += g.magic * times;
    s.defense += g.defense * times;
    s.resist += g.resist * times;
    s.speed += g.speed * times;
    return s;
}

} // namespace

Stats stats_at_level(Archetype a, int level) noexcept {
    return grow(base_stats(a), level_growth(a), std::max(level, 1) - 1);
}

int level_for_total_exp(long long total_exp) noexcept {
    int level = 1;
    while (cumulative_exp(level + 1) <= total_exp) ++level;
    return level;
}

std::string archetype_display_name(Archetype a, int level) {
    switch (a) {
    case Archetype::Prince: return "Prince";
    case Archetype::Witch: return "Witch";
    case Archetype::Monster:
        if (level <= 2) return "Imp";
        if (level <= 4) return "Ogre";
        return "Troll";
    }
    return "Monster";
}

Combatant make_combatant(CombatantId id, Archetype a, Side side, int level, std::string name) {
    Combatant c;
    c.id = id;
    c.archetype = a;
    c.level = std::max(level, 1);
    c.name = name.empty() ? archetype_display_name(a, c.level) : std::move(name);
    c.stats = stats_at_level(a, c.level);
    c.hp = c.stats.max_hp;
    c.side = side;
    return c;
}

bool satisfies_invariants(const Combatant& c) noexcept {
    const Stats& s = c.stats;
    if (s.max_hp < 1 || s.attack < 0 || s.magic < 0 || s.defense < 0 || s.resist < 0 || s.speed < 0)
        return false;
    if (c.hp < 0 || c.hp > s.max_hp || c.level < 1 || c.exp < 0) return false;
    if (c.exp >= exp_to_next(c.level)) return false;
    if (c.weapon) {
        const Weapon& w = *c.weapon;
        if (w.attack_bonus < 0 || w.magic_bonus < 0) return false;
        if (w.attack_bonus == 0 && w.magic_bonus == 0) return false;
    }
    return true;
}

AttackOutcome resolve_attack(const Combatant& attacker, const Combatant& defender, AttackKind kind) {
    if (!attacker.alive())
        throw RulesError(RulesErrc::DeadCombatant, "attacker '" + attacker.name + "' has no hp");
    if (!defender.alive())
        throw RulesError(RulesErrc::DeadCombatant, "defender '" + defender.name + "' has no hp");

    const int raw = kind == AttackKind::Physical
                        ? attacker.effective_attack() - defender.stats.defense
                        : 2 * attacker.effective_magic() - defender.stats.resist;
    AttackOutcome out;
    out.kind = kind;
    out.damage = std::max(1, raw);
    out.defender_hp_after = std::max(0, defender.hp - out.damage);
    out.defeated = out.defender_hp_after == 0;
    return out;
}

Awarded award_exp(Combatant c, int defeated_monster_level) {
    if (c.side != Side::Player)
        throw RulesError(RulesErrc::NotAPlayer, "'" + c.name + "' is not on the player side");
    LevelUpReport report;
    c.exp += exp_for_kill(std::max(defeated_monster_level, 1));
    const Stats growth = level_growth(c.archetype);
    while (c.exp >= exp_to_next(c.level)) {
        c.exp -= exp_to_next(c.level);
        ++c.level;
        ++report.levels_gained;
        c.stats = grow(c.stats, growth, 1);
        c.hp = c.stats.max_hp;
    }
    report.new_level = c.level;
    report.exp_remainder = c.exp;
    return {std::move(c), report};
}

std::vector<CombatantId> turn_order(std::span<const Combatant> combatants) {
    if (combatants.empty()) throw RulesError(RulesErrc::EmptyBattle, "no combatants to order");
    std::vector<const Combatant*> sorted;
    sorted.reserve(combatants.size());
    for (const Combatant& c : combatants) {
        if (!c.alive())
            throw RulesError(RulesErrc::DeadCombatant, "'" + c.name + "' cannot take a turn");
        sorted.push_back(&c);
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const Combatant* a, const Combatant* b) {
        if (a->stats.speed != b->stats.speed) return a->stats.speed > b->stats.speed;
        if (a->side != b->side) return a->side == Side::Player;
        return a->id < b->id;
    });
    std::vector<CombatantId> ids;
    ids.reserve(sorted.size());
    for (const Combatant* c : sorted) ids.push_back(c->id);
    return ids;
}

AttackKind monster_attack_kind(const Combatant& monster) noexcept {
    return monster.effective_magic() > monster.effective_attack() ? AttackKind::Magic
                                                                  : AttackKind::Physical;
}

CombatantId pick_target(std::uint64_t seed, std::uint64_t step, CombatantId actor,
                        std::vector<CombatantId> candidates) {
    if (candidates.empty()) throw RulesError(RulesErrc::InvalidTarget, "no target available");
    std::sort(candidates.begin(), candidates.end());
    const std::uint64_t draw = keyed_draw(seed, step, actor.value);
    return candidates[draw % candidates.size()];
}

// ---- Battle ----

const Combatant* Battle::find(CombatantId id) const noexcept {
    for (const Combatant& c : combatants)
        if (c.id == id) return &c;
    return nullptr;
}

Combatant* Battle::find(CombatantId id) noexcept {
    for (Combatant& c : combatants)
        if (c.id == id) return &c;
    return nullptr;
}

bool Battle::side_alive(Side s) const noexcept {
    return std::any_of(combatants.begin(), combatants.end(),
                       [s](const Combatant& c) { return c.side == s && c.alive(); });
}

namespace {

void record_attack(Battle& b, Combatant& attacker, Combatant& defender, AttackKind kind) {
    AttackOutcome out = resolve_attack(attacker, defender, kind);
    defender.hp = out.defender_hp_after;
    b.transcript.push_back({b.round, attacker.id, defender.id, out});
    if (!b.side_alive(Side::Enemy))
        b.winner = Side::Player;
    else if (!b.side_alive(Side::Player))
        b.winner = Side::Enemy;
}

void enemy_turn(Battle& b, Combatant& monster) {
    std::vector<CombatantId> targets;
    for (const Combatant& c : b.combatants)
        if (c.side == Side::Player && c.alive()) targets.push_back(c.id);
    const CombatantId target = pick_target(b.seed, b.round, monster.id, std::move(targets));
    record_attack(b, monster, *b.find(target), monster_attack_kind(monster));
}

// Runs until a player decision is needed or the battle is over.
void advance(Battle& b) {
    while (!b.winner) {
        if (b.pending.empty()) {
            std::vector<Combatant> alive;
            for (const Combatant& c : b.combatants)
                if (c.alive()) alive.push_back(c);
            ++b.round;
            b.pending = turn_order(alive);
        }
        Combatant* actor = b.find(b.pending.front());
        if (!actor->alive()) {
            b.pending.erase(b.pending.begin());
            continue;
        }
        if (actor->side == Side::Player) return;
        b.pending.erase(b.pending.begin());
        enemy_turn(b, *actor);
    }
    b.pending.clear();
}

} // namespace

Battle start_battle(std::vector<Combatant> party, std::vector<Combatant> enemies, std::uint64_t seed) {
    if (party.empty() || enemies.empty())
        throw RulesError(RulesErrc::EmptyBattle, "both sides need at least one combatant");
    Battle b;
    b.seed = seed;
    b.combatants.reserve(party.size() + enemies.size());
    for (Combatant& c : party) {
        c.side = Side::Player;
        b.combatants.push_back(std::move(c));
    }
    for (Combatant& c : enemies) {
        c.side = Side::Enemy;
        b.combatants.push_back(std::move(c));
    }
    for (const Combatant& c : b.combatants)
        if (!c.alive()) throw RulesError(RulesErrc::DeadCombatant, "'" + c.name + "' enters battle with no hp");
    advance(b);
    return b;
}

std::optional<CombatantId> awaiting_actor(const Battle& b) noexcept {
    if (b.winner || b.pending.empty()) return std::nullopt;
    return b.pending.front();
}

bool is_legal_action(const Battle& b, const Action& action) noexcept {
    if (!awaiting_actor(b)) return false;
    const Combatant* target = b.find(action.target);
    return target && target->side == Side::Enemy && target->alive();
}

Battle submit_action(Battle b, const Action& action) {
    const auto actor_id = awaiting_actor(b);
    if (!actor_id) throw RulesError(RulesErrc::BattleOver, "battle has already ended");
    if (!is_legal_action(b, action))
        throw RulesError(RulesErrc::InvalidTarget,
                         "target " + std::to_string(action.target.value) + " is dead or unknown");
    b.pending.erase(b.pending.begin());
    record_attack(b, *b.find(*actor_id), *b.find(action.target), action.kind);
    advance(b);
    return b;
}

BattleResult conclude_battle(const Battle& b) {
    if (!b.winner) throw RulesError(RulesErrc::BattleOver, "battle is still in progress");
    BattleResult result;
    result.winner = *b.winner;
    result.turns = static_cast<int>(b.round);
    result.transcript = b.transcript;

    std::vector<int> defeated_levels;
    for (const Combatant& c : b.combatants)
        if (c.side == Side::Enemy && !c.alive()) defeated_levels.push_back(c.level);

    for (const Combatant& c : b.combatants) {
        if (!c.alive()) continue;
        if (c.side == Side::Enemy) {
            result.survivors.push_back(c);
            continue;
        }
        Combatant member = c;
        ExpAward award{member.id, 0, {0, member.level, member.exp}};
        for (int lvl : defeated_levels) {
            Awarded a = award_exp(std::move(member), lvl);
            member = std::move(a.combatant);
            award.exp_gained += exp_for_kill(lvl);
            award.report.levels_gained += a.report.levels_gained;
            award.report.new_level = a.report.new_level;
            award.report.exp_remainder = a.report.exp_remainder;
        }
        result.exp_awards.push_back(award);
        result.survivors.push_back(std::move(member));
    }
    return result;
}

BattleResult run_battle(std::vector<Combatant> party, std::vector<Combatant> enemies,
                        std::span<const Action> player_actions, std::uint64_t seed) {
    Battle b = start_battle(std::move(party), std::move(enemies), seed);
    std::size_t next = 0;
    while (!b.winner) {
        if (next == player_actions.size())
            throw RulesError(RulesErrc::ActionFeedExhausted,
                             "action feed ran out after " + std::to_string(next) + " actions");
        b = submit_action(std::move(b), player_actions[next++]);
    }
    return conclude_battle(b);
}

} // namespace cursed
