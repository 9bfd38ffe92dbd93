#pragma once

// Combat and progression rules. Everything here is a pure function over
// values; a Battle is a plain value advanced by free functions.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cursed {

enum class Archetype { Prince, Monster, Witch };
enum class Side { Player, Enemy };
enum class AttackKind { Physical, Magic };

std::string_view to_string(Archetype a) noexcept;
std::string_view to_string(Side s) noexcept;
std::string_view to_string(AttackKind k) noexcept;
std::optional<Archetype> parse_archetype(std::string_view s) noexcept;
std::optional<Side> parse_side(std::string_view s) noexcept;
std::optional<AttackKind> parse_attack_kind(std::string_view s) noexcept;

struct CombatantId {
    std::uint32_t value = 0;
    friend constexpr auto operator<=>(CombatantId, CombatantId) = default;
};

struct Stats {
    int max_hp = 1;
    int attack = 0;
    int magic = 0;
    int defense = 0;
    int resist = 0;
    int speed = 0;
    friend bool operator==(const Stats&, const Stats&) = default;
};

struct Weapon {
    std::string name;
    int attack_bonus = 0;
    int magic_bonus = 0;
    friend bool operator==(const Weapon&, const Weapon&) = default;
};

struct Combatant {
    CombatantId id;
    Archetype archetype = Archetype::Monster;
    std::string name;
    int level = 1;
    int exp = 0;
    int hp = 1;
    Stats stats;
    std::optional<Weapon> weapon;
    Side side = Side::Enemy;

    bool alive() const noexcept { return hp > 0; }
    int effective_attack() const noexcept;
    int effective_magic() const noexcept;

    friend bool operator==(const Combatant&, const Combatant&) = default;
};

struct AttackOutcome {
    AttackKind kind = AttackKind::Physical;
    int damage = 1;
    int defender_hp_after = 0;
    bool defeated = false;
    friend bool operator==(const AttackOutcome&, const AttackOutcome&) = default;
};

struct LevelUpReport {
    int levels_gained = 0;
    int new_level = 1;
    int exp_remainder = 0;
    friend bool operator==(const LevelUpReport&, const LevelUpReport&) = default;
};

struct Action {
    AttackKind kind = AttackKind::Physical;
    CombatantId target;
    friend bool operator==(const Action&, const Action&) = default;
};

struct BattleEvent {
    std::uint32_t round = 0;
    CombatantId attacker;
    CombatantId defender;
    AttackOutcome outcome;
    friend bool operator==(const BattleEvent&, const BattleEvent&) = default;
};

struct ExpAward {
    CombatantId id;
    int exp_gained = 0;
    LevelUpReport report;
    friend bool operator==(const ExpAward&, const ExpAward&) = default;
};

struct BattleResult {
    Side winner = Side::Player;
    int turns = 0;
    std::vector<Combatant> survivors;
    std::vector<ExpAward> exp_awards;
    std::vector<BattleEvent> transcript;
    friend bool operator==(const BattleResult&, const BattleResult&) = default;
};

enum class RulesErrc {
    DeadCombatant,
    NotAPlayer,
    EmptyBattle,
    InvalidTarget,
    ActionFeedExhausted,
    BattleOver,
};

class RulesError : public std::runtime_error {
public:
    RulesError(RulesErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    RulesErrc code() const noexcept { return code_; }

private:
    RulesErrc code_;
};

// ---- archetype tables and progression ----

Stats base_stats(Archetype a) noexcept;
/// Stat increase applied per level gained.
Stats level_growth(Archetype a) noexcept;
Stats stats_at_level(Archetype a, int level) noexcept;

constexpr int exp_to_next(int level) noexcept { return 50 * level; }
constexpr int exp_for_kill(int monster_level) noexcept { return 10 * monster_level; }

/// Total EXP needed to reach `level` from level 1 with 0 EXP.
constexpr long long cumulative_exp(int level) noexcept {
    return 25LL * level * (level - 1);
}

/// Highest level whose cumulative threshold does not exceed total_exp.
int level_for_total_exp(long long total_exp) noexcept;

/// Display name used for spawned enemies of an archetype at a level.
std::string archetype_display_name(Archetype a, int level);

Combatant make_combatant(CombatantId id, Archetype a, Side side, int level, std::string name = {});

/// Checks the Stats and Combatant invariants (non-negative stats, hp range,
/// level >= 1, exp below the next threshold, weapon bonus rule).
bool satisfies_invariants(const Combatant& c) noexcept;

// ---- single operations ----

AttackOutcome resolve_attack(const Combatant& attacker, const Combatant& defender, AttackKind kind);

struct Awarded {
    Combatant combatant;
    LevelUpReport report;
};

Awarded award_exp(Combatant c, int defeated_monster_level);

std::vector<CombatantId> turn_order(std::span<const Combatant> combatants);

/// Monsters cast magic iff their magic exceeds their attack.
AttackKind monster_attack_kind(const Combatant& monster) noexcept;

/// Picks a target among `candidates` (must be non-empty) using the keyed
/// SplitMix64 stream. Candidates are ordered by ascending id first.
CombatantId pick_target(std::uint64_t seed, std::uint64_t step, CombatantId actor,
                        std::vector<CombatantId> candidates);

// ---- battles ----

struct Battle {
    std::vector<Combatant> combatants;
    std::uint64_t seed = 0;
    std::uint32_t round = 0;
    /// Actors still to move this round, front first.
    std::vector<CombatantId> pending;
    std::vector<BattleEvent> transcript;
    std::optional<Side> winner;

    const Combatant* find(CombatantId id) const noexcept;
    Combatant* find(CombatantId id) noexcept;
    bool side_alive(Side s) const noexcept;

    friend bool operator==(const Battle&, const Battle&) = default;
};

/// Sets up a battle and advances it to the first player decision (or the end).
Battle start_battle(std::vector<Combatant> party, std::vector<Combatant> enemies, std::uint64_t seed);

/// The player-side combatant whose action is awaited, if any.
std::optional<CombatantId> awaiting_actor(const Battle& b) noexcept;

/// Whether `action` is a legal choice for the awaited actor.
bool is_legal_action(const Battle& b, const Action& action) noexcept;

/// Applies the awaited player's action, then runs enemy turns until the next
/// player decision or the end of the battle.
Battle submit_action(Battle b, const Action& action);

/// Final result; awards EXP to every surviving party member for each
/// defeated enemy. Requires a finished battle.
BattleResult conclude_battle(const Battle& b);

BattleResult run_battle(std::vector<Combatant> party, std::vector<Combatant> enemies,
                        std::span<const Action> player_actions, std::uint64_t seed);

} // namespace cursed
