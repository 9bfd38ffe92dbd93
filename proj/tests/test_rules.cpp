#include "cursed/codec.hpp"
#include "cursed/rng.hpp"
#include "cursed/rules.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace cursed;

namespace {

Combatant prince_with_sword() {
    Combatant p = make_combatant(CombatantId{1}, Archetype::Prince, Side::Player, 1, "Prince");
    p.weapon = Weapon{"Sword", 4, 0};
    return p;
}

Combatant imp(std::uint32_t id = 101) {
    return make_combatant(CombatantId{id}, Archetype::Monster, Side::Enemy, 1, "Imp");
}

Combatant bare(std::uint32_t id, Side side, Stats st) {
    Combatant c;
    c.id = CombatantId{id};
    c.archetype = side == Side::Player ? Archetype::Prince : Archetype::Monster;
    c.side = side;
    c.stats = st;
    c.hp = st.max_hp;
    return c;
}

} // namespace

TEST_CASE("splitmix64 reference values") {
    // First outputs for seed 0 and seed 1234567 (published test vectors).
    SplitMix64 g(0);
    CHECK(g.next() == 0xe220a8397b1dcdafULL);
    CHECK(g.next() == 0x6e789e6aa1b965f4ULL);
    SplitMix64 h(1234567);
    CHECK(h.next() == 6457827717110365317ULL);
    CHECK(h.next() == 3203168211198807973ULL);
}

TEST_CASE("base tables") {
    CHECK(stats_at_level(Archetype::Prince, 1) == Stats{30, 8, 6, 3, 2, 5});
    CHECK(stats_at_level(Archetype::Prince, 3) == Stats{50, 12, 10, 5, 4, 5});
    CHECK(stats_at_level(Archetype::Monster, 1).defense == 1);
    CHECK(stats_at_level(Archetype::Monster, 1).max_hp == 20);
    CHECK(exp_to_next(1) == 50);
    CHECK(exp_for_kill(3) == 30);
    CHECK(cumulative_exp(1) == 0);
    CHECK(cumulative_exp(3) == 150);
    CHECK(level_for_total_exp(149) == 2);
    CHECK(level_for_total_exp(150) == 3);
    CHECK(archetype_display_name(Archetype::Monster, 1) == "Imp");
}

TEST_CASE("resolve_attack examples") {
    SUBCASE("prince with sword vs imp") {
        const auto out = resolve_attack(prince_with_sword(), imp(), AttackKind::Physical);
        CHECK(out.damage == 11);
        CHECK(out.defender_hp_after == 9);
        CHECK_FALSE(out.defeated);
    }
    SUBCASE("damage floor") {
        const auto a = bare(1, Side::Player, {10, 1, 0, 0, 0, 0});
        const auto d = bare(2, Side::Enemy, {10, 0, 0, 99, 0, 0});
        CHECK(resolve_attack(a, d, AttackKind::Physical).damage == 1);
    }
    SUBCASE("witch magic") {
        auto witch = bare(200, Side::Enemy, {40, 0, 14, 0, 0, 0});
        const auto out = resolve_attack(witch, make_combatant(CombatantId{1}, Archetype::Prince, Side::Player, 1),
                                        AttackKind::Magic);
        CHECK(out.damage == 26);
        CHECK(out.defender_hp_after == 4);
    }
    SUBCASE("defeat clamps hp at zero") {
        auto target = imp();
        target.hp = 3;
        const auto out = resolve_attack(prince_with_sword(), target, AttackKind::Physical);
        CHECK(out.defender_hp_after == 0);
        CHECK(out.defeated);
    }
    SUBCASE("dead attacker or defender") {
        auto dead = imp();
        dead.hp = 0;
        try {
            resolve_attack(prince_with_sword(), dead, AttackKind::Physical);
            FAIL("expected DeadCombatant");
        } catch (const RulesError& e) {
            CHECK(e.code() == RulesErrc::DeadCombatant);
        }
        CHECK_THROWS_AS(resolve_attack(dead, prince_with_sword(), AttackKind::Magic), RulesError);
    }
}

TEST_CASE("resolve_attack is pure and bounded") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> d(0, 30);
    for (int i = 0; i < 2000; ++i) {
        auto a = bare(1, Side::Player, {d(rng) + 1, d(rng), d(rng), d(rng), d(rng), d(rng)});
        auto b = bare(2, Side::Enemy, {d(rng) + 1, d(rng), d(rng), d(rng), d(rng), d(rng)});
        b.hp = 1 + d(rng) % b.stats.max_hp;
        const auto a0 = a, b0 = b;
        for (AttackKind k : {AttackKind::Physical, AttackKind::Magic}) {
            const auto o = resolve_attack(a, b, k);
            CHECK(o == resolve_attack(a, b, k));
            CHECK(o.damage >= 1);
            CHECK(o.defender_hp_after >= 0);
            CHECK(o.defender_hp_after <= b.stats.max_hp);
            CHECK(o.defeated == (o.defender_hp_after == 0));
        }
        CHECK(a == a0);
        CHECK(b == b0);
    }
}

TEST_CASE("award_exp examples") {
    SUBCASE("45 + 10 crosses one threshold") {
        auto p = make_combatant(CombatantId{1}, Archetype::Prince, Side::Player, 1);
        p.exp = 45;
        p.hp = 3;
        const auto [c, r] = award_exp(p, 1);
        CHECK(c.level == 2);
        CHECK(c.exp == 5);
        CHECK(r.levels_gained == 1);
        CHECK(r.new_level == 2);
        CHECK(r.exp_remainder == 5);
        CHECK(c.hp == c.stats.max_hp);
        CHECK(c.stats.max_hp == 40);
    }
    SUBCASE("no threshold") {
        const auto [c, r] = award_exp(make_combatant(CombatantId{1}, Archetype::Prince, Side::Player, 1), 1);
        CHECK(c.level == 1);
        CHECK(c.exp == 10);
        CHECK(r.levels_gained == 0);
    }
    SUBCASE("multi-level cascade") {
        auto p = make_combatant(CombatantId{1}, Archetype::Prince, Side::Player, 1);
        p.exp = 40;
        const auto [c, r] = award_exp(p, 11);
        CHECK(c.level == 3);
        CHECK(c.exp == 0);
        CHECK(r.levels_gained == 2);
        CHECK(c.stats == stats_at_level(Archetype::Prince, 3));
    }
    SUBCASE("enemies cannot gain exp") {
        try {
            award_exp(imp(), 1);
            FAIL("expected NotAPlayer");
        } catch (const RulesError& e) {
            CHECK(e.code() == RulesErrc::NotAPlayer);
        }
    }
}

TEST_CASE("award_exp invariants") {
    std::mt19937 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const int level = 1 + static_cast<int>(rng() % 10);
        auto p = make_combatant(CombatantId{1}, Archetype::Prince, Side::Player, level);
        p.exp = static_cast<int>(rng() % static_cast<unsigned>(exp_to_next(level)));
        const int monster = 1 + static_cast<int>(rng() % 20);
        const auto [c, r] = award_exp(p, monster);
        CHECK(c.exp < exp_to_next(c.level));
        CHECK(c.level >= p.level);
        CHECK(c.level == p.level + r.levels_gained);
        if (r.levels_gained > 0) CHECK(c.stats.max_hp > p.stats.max_hp);
        CHECK(satisfies_invariants(c));
        // Total exp is conserved.
        CHECK(cumulative_exp(c.level) + c.exp == cumulative_exp(p.level) + p.exp + exp_for_kill(monster));
    }
}

TEST_CASE("turn_order examples") {
    auto prince = make_combatant(CombatantId{1}, Archetype::Prince, Side::Player, 1);
    SUBCASE("singleton") {
        std::vector<Combatant> one{prince};
        CHECK(turn_order(one) == std::vector<CombatantId>{CombatantId{1}});
    }
    SUBCASE("speed") {
        std::vector<Combatant> v{imp(), prince};
        CHECK(turn_order(v) == std::vector<CombatantId>{CombatantId{1}, CombatantId{101}});
    }
    SUBCASE("tie goes to player side") {
        auto p = prince;
        p.stats.speed = 6;
        auto w = make_combatant(CombatantId{0}, Archetype::Witch, Side::Enemy, 1);
        w.stats.speed = 6;
        std::vector<Combatant> v{w, p};
        CHECK(turn_order(v) == std::vector<CombatantId>{CombatantId{1}, CombatantId{0}});
    }
    SUBCASE("empty and dead") {
        std::vector<Combatant> none;
        CHECK_THROWS_AS(turn_order(none), RulesError);
        auto dead = imp();
        dead.hp = 0;
        std::vector<Combatant> v{prince, dead};
        CHECK_THROWS_AS(turn_order(v), RulesError);
    }
}

TEST_CASE("turn_order is a stable permutation") {
    std::mt19937 rng(3);
    for (int i = 0; i < 300; ++i) {
        std::vector<Combatant> v;
        const int n = 1 + static_cast<int>(rng() % 6);
        for (int k = 0; k < n; ++k) {
            auto c = bare(static_cast<std::uint32_t>(k * 7 + 1), rng() % 2 ? Side::Player : Side::Enemy,
                          {5, 1, 1, 1, 1, static_cast<int>(rng() % 3)});
            v.push_back(c);
        }
        const auto order = turn_order(v);
        CHECK(order.size() == v.size());
        std::shuffle(v.begin(), v.end(), rng);
        CHECK(turn_order(v) == order);
        std::vector<CombatantId> ids;
        for (const auto& c : v) ids.push_back(c.id);
        std::sort(ids.begin(), ids.end());
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == ids);
    }
}

TEST_CASE("run_battle: prince with sword beats an imp in two rounds") {
    const std::vector<Action> feed(2, Action{AttackKind::Physical, CombatantId{101}});
    const auto r = run_battle({prince_with_sword()}, {imp()}, feed, 0);
    CHECK(r.winner == Side::Player);
    CHECK(r.turns == 2);
    REQUIRE(r.transcript.size() == 3);
    CHECK(r.transcript[0].outcome.damage == 11);
    CHECK(r.transcript[0].outcome.defender_hp_after == 9);
    CHECK(r.transcript[1].attacker == CombatantId{101});
    CHECK(r.transcript[2].outcome.defeated);
    REQUIRE(r.exp_awards.size() == 1);
    CHECK(r.exp_awards[0].exp_gained == 10);
    CHECK(r.survivors.front().exp == 10);
}

TEST_CASE("run_battle errors") {
    const std::vector<Action> feed(5, Action{AttackKind::Physical, CombatantId{101}});
    auto expect = [](auto f, RulesErrc code) {
        try {
            f();
            FAIL("expected RulesError");
        } catch (const RulesError& e) {
            CHECK(e.code() == code);
        }
    };
    expect([&] { run_battle({prince_with_sword()}, {}, feed, 0); }, RulesErrc::EmptyBattle);
    expect([&] { run_battle({}, {imp()}, feed, 0); }, RulesErrc::EmptyBattle);
    expect([&] { run_battle({prince_with_sword()}, {imp()}, std::span<const Action>{}, 0); },
           RulesErrc::ActionFeedExhausted);
    const std::vector<Action> bad{Action{AttackKind::Physical, CombatantId{999}}};
    expect([&] { run_battle({prince_with_sword()}, {imp()}, bad, 0); }, RulesErrc::InvalidTarget);
    const std::vector<Action> self{Action{AttackKind::Physical, CombatantId{1}}};
    expect([&] { run_battle({prince_with_sword()}, {imp()}, self, 0); }, RulesErrc::InvalidTarget);
}

TEST_CASE("run_battle is deterministic to the byte") {
    std::vector<Combatant> party{prince_with_sword(),
                                 make_combatant(CombatantId{2}, Archetype::Prince, Side::Player, 2, "Ally")};
    std::vector<Combatant> foes{make_combatant(CombatantId{101}, Archetype::Monster, Side::Enemy, 3, "Ogre #1"),
                                make_combatant(CombatantId{102}, Archetype::Monster, Side::Enemy, 3, "Ogre #2")};
    std::vector<Action> feed;
    for (int i = 0; i < 40; ++i) feed.push_back({AttackKind::Physical, CombatantId{i < 8 ? 101u : 102u}});
    // Targets die part-way; drive interactively so the feed stays legal.
    auto play = [&](std::uint64_t seed) {
        Battle b = start_battle(party, foes, seed);
        while (!b.winner) {
            CombatantId t;
            for (const auto& c : b.combatants)
                if (c.side == Side::Enemy && c.alive()) {
                    t = c.id;
                    break;
                }
            b = submit_action(std::move(b), Action{AttackKind::Physical, t});
        }
        return canonical(to_json(conclude_battle(b)));
    };
    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL, ~0ULL}) CHECK(play(seed) == play(seed));
}

TEST_CASE("monster policy and targeting") {
    auto m = imp();
    CHECK(monster_attack_kind(m) == AttackKind::Physical);
    m.stats.magic = 50;
    CHECK(monster_attack_kind(m) == AttackKind::Magic);
    std::vector<CombatantId> targets{CombatantId{5}, CombatantId{2}, CombatantId{9}};
    const auto t = pick_target(42, 3, CombatantId{101}, targets);
    std::vector<CombatantId> sorted{CombatantId{2}, CombatantId{5}, CombatantId{9}};
    CHECK(t == sorted[keyed_draw(42, 3, 101) % 3]);
}

TEST_CASE("battle json round trip") {
    Battle b = start_battle({prince_with_sword()}, {imp(), imp(102)}, 5);
    b = submit_action(std::move(b), Action{AttackKind::Magic, CombatantId{102}});
    const Json j = to_json(b);
    CHECK(battle_from_json(j) == b);
    CHECK(canonical(to_json(battle_from_json(j))) == canonical(j));
}
