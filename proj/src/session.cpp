#include "cursed/session.hpp"

#include "cursed/rng.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

namespace cursed {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr CombatantId kPrinceId{1};
constexpr std::uint32_t kFirstEnemyId = 101;

Combatant fresh_prince() { return make_combatant(kPrinceId, Archetype::Prince, Side::Player, 1, "Prince"); }

const Chapter& chapter_at(const SessionState& s, int index) {
    return s.campaign.chapters.at(static_cast<std::size_t>(index));
}

const Scene& scene_at(const SessionState& s, Progress p) {
    return chapter_at(s, p.chapter).scenes.at(static_cast<std::size_t>(p.scene));
}

void emit(std::vector<Event>& ev, EventKind kind, std::string text) {
    ev.push_back({kind, std::move(text), std::nullopt});
}

std::string scene_label(const SessionState& s, Progress p) {
    return chapter_at(s, p.chapter).name + " #" + std::to_string(p.scene + 1);
}

void heal_party(SessionState& s) {
    for (Combatant& c : s.party) c.hp = c.stats.max_hp;
}

std::string weapon_label(const Weapon& w) {
    if (w.attack_bonus > 0 && w.magic_bonus > 0)
        return w.name + " (+" + std::to_string(w.attack_bonus) + " attack, +" + std::to_string(w.magic_bonus) +
               " magic)";
    if (w.attack_bonus > 0) return w.name + " (+" + std::to_string(w.attack_bonus) + " attack)";
    return w.name + " (+" + std::to_string(w.magic_bonus) + " magic)";
}

void enter_scene(SessionState& s, std::vector<Event>& ev);

void emit_attacks(const cursed::Battle& b, std::size_t from, std::vector<Event>& ev) {
    for (std::size_t i = from; i < b.transcript.size(); ++i) {
        const BattleEvent& e = b.transcript[i];
        const Combatant* atk = b.find(e.attacker);
        const Combatant* def = b.find(e.defender);
        std::string text = (atk ? atk->name : "?") + " hits " + (def ? def->name : "?") + " with a " +
                           std::string(to_string(e.outcome.kind)) + " attack for " +
                           std::to_string(e.outcome.damage) + " damage";
        if (e.outcome.defeated) text += "; " + (def ? def->name : std::string("?")) + " falls";
        ev.push_back({EventKind::Attack, std::move(text), e});
    }
}

void complete_scene(SessionState& s, std::vector<Event>& ev) {
    emit(ev, EventKind::SceneCompleted, scene_label(s, s.progress));
    emit(ev, EventKind::Autosave, scene_label(s, s.progress));
    const Chapter& ch = chapter_at(s, s.progress.chapter);
    if (static_cast<std::size_t>(s.progress.scene + 1) < ch.scenes.size()) {
        ++s.progress.scene;
        enter_scene(s, ev);
        return;
    }
    if (static_cast<std::size_t>(s.progress.chapter + 1) == s.campaign.chapters.size()) {
        s.screen = screen::Win{};
        emit(ev, EventKind::Victory, "The Witch is defeated and the curse is broken");
        return;
    }
    s.tally.level = s.party.front().level;
    s.screen = screen::ChapterComplete{s.tally};
    emit(ev, EventKind::ChapterCompleted, ch.name);
}

// Called whenever the battle on screen may have ended.
void settle_battle(SessionState& s, std::vector<Event>& ev) {
    auto& live = std::get<screen::Battle>(s.screen).battle;
    if (!live.winner) return;

    if (*live.winner == Side::Enemy) {
        for (Combatant& member : s.party)
            if (const Combatant* c = live.find(member.id)) member = *c;
        s.screen = screen::Lose{};
        emit(ev, EventKind::Defeat, "The Prince has fallen");
        return;
    }

    const BattleResult result = conclude_battle(live);
    int defeated = 0;
    for (const Combatant& c : live.combatants)
        if (c.side == Side::Enemy && !c.alive()) ++defeated;
    for (Combatant& member : s.party) {
        auto it = std::find_if(result.survivors.begin(), result.survivors.end(),
                               [&](const Combatant& c) { return c.id == member.id; });
        if (it != result.survivors.end()) member = *it;
    }
    for (const ExpAward& a : result.exp_awards) {
        if (a.id == kPrinceId) s.tally.exp_gained += a.exp_gained;
        if (a.report.levels_gained > 0)
            emit(ev, EventKind::LevelUp, "Level " + std::to_string(a.report.new_level) + " reached");
    }
    s.tally.monsters_defeated += defeated;
    heal_party(s);
    emit(ev, EventKind::BattleWon, "Victory in " + std::to_string(result.turns) + " rounds");
    complete_scene(s, ev);
}

void enter_scene(SessionState& s, std::vector<Event>& ev) {
    s.last_reached = std::max(s.last_reached, s.progress);
    const Scene& sc = scene_at(s, s.progress);
    emit(ev, EventKind::SceneEntered, scene_label(s, s.progress));
    std::visit(Overloaded{
                   [&](const cursed::Narration& n) { s.screen = screen::Narration{n.text}; },
                   [&](const cursed::Dialog& d) { s.screen = screen::Dialog{d.npc, d.lines, 0}; },
                   [&](const WeaponChoice& w) { s.screen = screen::WeaponSelect{w.options}; },
                   [&](const QuestScene& q) {
                       auto it = s.quest_states.find(s.progress);
                       if (it == s.quest_states.end())
                           it = s.quest_states.emplace(s.progress, start_quest(q.spec)).first;
                       s.screen = screen::Quest{it->second};
                   },
                   [&](const BattleScene& b) {
                       const std::uint64_t battle_seed = keyed_draw(
                           s.seed, static_cast<std::uint64_t>(s.progress.chapter),
                           static_cast<std::uint64_t>(s.progress.scene));
                       s.screen = screen::Battle{start_battle(s.party, spawn_enemies(b), battle_seed)};
                       emit_attacks(std::get<screen::Battle>(s.screen).battle, 0, ev);
                       settle_battle(s, ev);
                   },
               },
               sc.body);
}

void start_chapter(SessionState& s, int chapter) {
    s.progress = {chapter, 0};
    s.tally = ChapterSummary{chapter_at(s, chapter).name, 0, 0, s.party.front().level};
}

std::pair<std::string_view, std::string_view> split_input(std::string_view input) {
    auto colon = input.find(':');
    if (colon == std::string_view::npos) return {input, {}};
    return {input.substr(0, colon), input.substr(colon + 1)};
}

std::uint32_t parse_id(std::string_view s) {
    std::uint32_t v = 0;
    for (char c : s) v = v * 10 + static_cast<std::uint32_t>(c - '0');
    return v;
}

MemberSummary summarize(const Combatant& c) {
    MemberSummary m;
    m.id = c.id.value;
    m.name = c.name;
    m.hp = c.hp;
    m.max_hp = c.stats.max_hp;
    m.level = c.level;
    m.exp = c.exp;
    m.exp_to_next = exp_to_next(c.level);
    if (c.weapon) m.weapon = c.weapon->name;
    return m;
}

} // namespace

ScreenKind kind_of(const Screen& s) noexcept { return static_cast<ScreenKind>(s.index()); }

std::string_view to_string(ScreenKind k) noexcept {
    switch (k) {
    case ScreenKind::MainMenu: return "MainMenu";
    case ScreenKind::About: return "About";
    case ScreenKind::Narration: return "Narration";
    case ScreenKind::Dialog: return "Dialog";
    case ScreenKind::WeaponSelect: return "WeaponSelect";
    case ScreenKind::Quest: return "Quest";
    case ScreenKind::Battle: return "Battle";
    case ScreenKind::ChapterComplete: return "ChapterComplete";
    case ScreenKind::Win: return "Win";
    case ScreenKind::Lose: return "Lose";
    case ScreenKind::Exited: return "Exited";
    }
    return "?";
}

std::string_view to_string(EventKind k) noexcept {
    switch (k) {
    case EventKind::SceneEntered: return "scene_entered";
    case EventKind::SceneCompleted: return "scene_completed";
    case EventKind::Autosave: return "autosave";
    case EventKind::Attack: return "attack";
    case EventKind::LevelUp: return "level_up";
    case EventKind::WeaponEquipped: return "weapon_equipped";
    case EventKind::QuestProgress: return "quest_progress";
    case EventKind::QuestCompleted: return "quest_completed";
    case EventKind::QuestFailed: return "quest_failed";
    case EventKind::BattleWon: return "battle_won";
    case EventKind::Defeat: return "defeat";
    case EventKind::ChapterCompleted: return "chapter_completed";
    case EventKind::Victory: return "victory";
    case EventKind::Retry: return "retry";
    case EventKind::LoadRequested: return "load_requested";
    case EventKind::MultiplayerRequested: return "multiplayer_requested";
    case EventKind::Exited: return "exited";
    }
    return "?";
}

SessionState new_session(CampaignScript campaign, std::uint64_t seed) {
    const auto diags = validate_campaign(campaign);
    if (count_errors(diags) > 0)
        throw SessionError(SessionErrc::InvalidCampaign,
                           "campaign has " + std::to_string(count_errors(diags)) + " validation error(s)");
    SessionState s;
    s.screen = screen::MainMenu{};
    s.campaign = std::move(campaign);
    s.party = {fresh_prince()};
    s.seed = seed;
    return s;
}

ViewModel current_view(const SessionState& s) {
    ViewModel v;
    v.screen = kind_of(s.screen);
    v.title = s.campaign.title;
    for (const Combatant& c : s.party) v.party.push_back(summarize(c));

    auto add = [&](std::string id, std::string label, bool enabled = true) {
        v.choices.push_back({std::move(id), std::move(label), enabled});
    };

    std::visit(
        Overloaded{
            [&](const screen::MainMenu&) {
                add("play", "Play game");
                add("continue", "Continue", s.save_available);
                add("multiplayer", "Multiplayer");
                add("about", "About");
                add("exit", "Exit");
            },
            [&](const screen::About&) {
                v.text = {s.campaign.title, "A turn-based role-playing game.",
                          "Created by the Cursed Prince project contributors."};
                add("back", "Back");
            },
            [&](const screen::Narration& n) {
                v.title = chapter_at(s, s.progress.chapter).name;
                v.text = {n.text};
                add("next", "Next");
            },
            [&](const screen::Dialog& d) {
                v.title = chapter_at(s, s.progress.chapter).name;
                v.text = {std::string(to_string(d.npc)) + ": " + d.lines.at(static_cast<std::size_t>(d.cursor))};
                add("next", "Next");
            },
            [&](const screen::WeaponSelect& w) {
                v.title = chapter_at(s, s.progress.chapter).name;
                v.text = {"Choose your weapon."};
                for (std::size_t i = 0; i < w.options.size(); ++i)
                    add("weapon:" + std::to_string(i), weapon_label(w.options[i]));
            },
            [&](const screen::Quest& q) {
                v.title = chapter_at(s, s.progress.chapter).name;
                const QuestState& st = q.state;
                std::visit(Overloaded{
                               [&](const FetchItem& f) {
                                   v.text.push_back("Find the " + f.item + ".");
                                   if (f.hint) v.text.push_back(*f.hint);
                                   add("search", "Search for the " + f.item);
                               },
                               [&](const CombineItems& c) {
                                   std::string recipe;
                                   for (std::size_t i = 0; i < c.inputs.size(); ++i)
                                       recipe += (i ? " + " : "") + c.inputs[i];
                                   v.text.push_back("Combine " + recipe + " into " + c.output + ".");
                                   for (const auto& item : c.inputs)
                                       if (!st.inventory.contains(item)) add("gather:" + item, "Gather " + item);
                                   add("combine", "Combine");
                               },
                               [&](const Question& qq) {
                                   v.text.push_back(qq.prompt);
                                   if (st.status == QuestStatus::Failed) v.text.push_back("That is not right. Try again.");
                                   for (std::size_t i = 0; i < qq.choices.size(); ++i)
                                       add("answer:" + std::to_string(i), qq.choices[i]);
                               },
                           },
                           st.spec);
                if (!st.inventory.empty()) {
                    std::string inv = "Carrying:";
                    for (const auto& [item, n] : st.inventory)
                        inv += " " + item + (n > 1 ? " x" + std::to_string(n) : "");
                    v.text.push_back(inv);
                }
            },
            [&](const screen::Battle& b) {
                v.title = chapter_at(s, s.progress.chapter).name;
                v.text = {"Round " + std::to_string(b.battle.round)};
                v.party.clear();
                for (const Combatant& c : b.battle.combatants)
                    (c.side == Side::Player ? v.party : v.foes).push_back(summarize(c));
                for (const Combatant& c : b.battle.combatants) {
                    if (c.side != Side::Enemy || !c.alive()) continue;
                    add("physical:" + std::to_string(c.id.value), "Physical attack on " + c.name);
                    add("magic:" + std::to_string(c.id.value), "Magic attack on " + c.name);
                }
            },
            [&](const screen::ChapterComplete& c) {
                v.title = c.summary.chapter;
                v.text = {"Chapter complete: " + c.summary.chapter,
                          "EXP gained: " + std::to_string(c.summary.exp_gained),
                          "Monsters defeated: " + std::to_string(c.summary.monsters_defeated),
                          "Level: " + std::to_string(c.summary.level)};
                add("next", "Next chapter");
            },
            [&](const screen::Win&) {
                v.text = {"The Witch is defeated. The curse lifts and the Prince stands as a man once more.",
                          "The court returns from hiding to celebrate."};
                add("return", "Return to main menu");
            },
            [&](const screen::Lose&) {
                v.text = {"The Prince has fallen."};
                add("continue", "Continue from the last level reached");
                add("menu", "Return to main menu");
            },
            [&](const screen::Exited&) { v.text = {"Goodbye."}; },
        },
        s.screen);
    return v;
}

std::vector<std::string> legal_inputs(const SessionState& s) {
    std::vector<std::string> out;
    for (const Choice& c : current_view(s).choices)
        if (c.enabled) out.push_back(c.id);
    return out;
}

Transition handle_input(SessionState s, std::string_view input) {
    const auto legal = legal_inputs(s);
    if (std::find(legal.begin(), legal.end(), input) == legal.end()) {
        if (kind_of(s.screen) == ScreenKind::MainMenu && input == "continue")
            throw SessionError(SessionErrc::NoSave, "no saved game to continue");
        throw SessionError(SessionErrc::IllegalInput,
                           "input '" + std::string(input) + "' is not available on " +
                               std::string(to_string(kind_of(s.screen))));
    }

    std::vector<Event> ev;
    const auto [verb, arg] = split_input(input);

    switch (kind_of(s.screen)) {
    case ScreenKind::MainMenu:
        if (verb == "play") {
            s.party = {fresh_prince()};
            s.quest_states.clear();
            s.last_reached = {};
            start_chapter(s, 0);
            enter_scene(s, ev);
        } else if (verb == "continue") {
            emit(ev, EventKind::LoadRequested, s.save_slot.value_or(""));
        } else if (verb == "multiplayer") {
            emit(ev, EventKind::MultiplayerRequested, "");
        } else if (verb == "about") {
            s.screen = screen::About{};
        } else {
            s.screen = screen::Exited{};
            emit(ev, EventKind::Exited, "");
        }
        break;

    case ScreenKind::About:
        s.screen = screen::MainMenu{};
        break;

    case ScreenKind::Narration:
        complete_scene(s, ev);
        break;

    case ScreenKind::Dialog: {
        auto& d = std::get<screen::Dialog>(s.screen);
        if (static_cast<std::size_t>(d.cursor + 1) < d.lines.size())
            ++d.cursor;
        else
            complete_scene(s, ev);
        break;
    }

    case ScreenKind::WeaponSelect: {
        const auto& w = std::get<screen::WeaponSelect>(s.screen);
        const Weapon chosen = w.options.at(parse_id(arg));
        s.party.front().weapon = chosen;
        emit(ev, EventKind::WeaponEquipped, chosen.name);
        complete_scene(s, ev);
        break;
    }

    case ScreenKind::Quest: {
        QuestState& st = std::get<screen::Quest>(s.screen).state;
        QuestAction action;
        if (verb == "search")
            action = PickUp{std::get<FetchItem>(st.spec).item};
        else if (verb == "gather")
            action = PickUp{std::string(arg)};
        else if (verb == "combine")
            action = Combine{std::get<CombineItems>(st.spec).inputs};
        else
            action = Answer{static_cast<int>(parse_id(arg))};
        st = evaluate_quest(std::move(st), action);
        s.quest_states[s.progress] = st;
        if (st.status == QuestStatus::Completed) {
            emit(ev, EventKind::QuestCompleted, scene_label(s, s.progress));
            complete_scene(s, ev);
        } else if (st.status == QuestStatus::Failed) {
            emit(ev, EventKind::QuestFailed, scene_label(s, s.progress));
        } else {
            emit(ev, EventKind::QuestProgress, std::string(input));
        }
        break;
    }

    case ScreenKind::Battle: {
        auto& live = std::get<screen::Battle>(s.screen).battle;
        const std::size_t before = live.transcript.size();
        const Action action{verb == "magic" ? AttackKind::Magic : AttackKind::Physical, CombatantId{parse_id(arg)}};
        live = submit_action(std::move(live), action);
        emit_attacks(live, before, ev);
        settle_battle(s, ev);
        break;
    }

    case ScreenKind::ChapterComplete:
        start_chapter(s, s.progress.chapter + 1);
        enter_scene(s, ev);
        break;

    case ScreenKind::Win:
        s.screen = screen::MainMenu{};
        break;

    case ScreenKind::Lose:
        if (verb == "continue") {
            s.progress = s.last_reached;
            heal_party(s);
            emit(ev, EventKind::Retry, scene_label(s, s.progress));
            enter_scene(s, ev);
        } else {
            s.screen = screen::MainMenu{};
        }
        break;

    case ScreenKind::Exited:
        break;
    }
    return {std::move(s), std::move(ev)};
}

const std::vector<FsmEdge>& fsm_edges() {
    static const std::vector<FsmEdge> edges = {
        {ScreenKind::MainMenu, "play", {Dest::FirstScene}},
        {ScreenKind::MainMenu, "continue", {Dest::Stay}},
        {ScreenKind::MainMenu, "multiplayer", {Dest::Stay}},
        {ScreenKind::MainMenu, "about", {Dest::About}},
        {ScreenKind::MainMenu, "exit", {Dest::Exited}},
        {ScreenKind::About, "back", {Dest::MainMenu}},
        {ScreenKind::Narration, "next", {Dest::NextScene}},
        {ScreenKind::Dialog, "next", {Dest::Stay, Dest::NextScene}},
        {ScreenKind::WeaponSelect, "weapon:", {Dest::NextScene}},
        {ScreenKind::Quest, "search", {Dest::NextScene}},
        {ScreenKind::Quest, "gather:", {Dest::Stay}},
        {ScreenKind::Quest, "combine", {Dest::Stay, Dest::NextScene}},
        {ScreenKind::Quest, "answer:", {Dest::Stay, Dest::NextScene}},
        {ScreenKind::Battle, "physical:", {Dest::Stay, Dest::NextScene, Dest::Lose}},
        {ScreenKind::Battle, "magic:", {Dest::Stay, Dest::NextScene, Dest::Lose}},
        {ScreenKind::ChapterComplete, "next", {Dest::NextChapter}},
        {ScreenKind::Win, "return", {Dest::MainMenu}},
        {ScreenKind::Lose, "continue", {Dest::LastReached}},
        {ScreenKind::Lose, "menu", {Dest::MainMenu}},
    };
    return edges;
}

// ---- driver ----

SessionDriver::SessionDriver(CampaignScript campaign, std::uint64_t seed,
                             std::optional<std::filesystem::path> save_file, std::optional<std::string> slot_name)
    : state_(new_session(std::move(campaign), seed)), save_file_(std::move(save_file)) {
    if (save_file_) {
        state_.save_slot = slot_name ? *slot_name : save_file_->filename().string();
        std::error_code ec;
        state_.save_available = std::filesystem::exists(*save_file_, ec);
    }
}

std::vector<Event> SessionDriver::input(std::string_view choice) {
    Transition t = handle_input(state_, choice);
    bool autosave = false;
    for (const Event& e : t.events) {
        if (e.kind == EventKind::LoadRequested) {
            if (!save_file_) throw SessionError(SessionErrc::NoSave, "no save file configured");
            std::ifstream in(*save_file_, std::ios::binary);
            if (!in) throw SessionError(SessionErrc::NoSave, "cannot read " + save_file_->string());
            std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            t.state = load_session(bytes);
            t.state.save_available = true;
        }
        if (e.kind == EventKind::Autosave) autosave = true;
    }
    state_ = std::move(t.state);
    if (autosave && save_file_) write_save();
    return std::move(t.events);
}

void SessionDriver::write_save() {
    state_.save_available = true;
    const auto bytes = save_session(state_);
    std::filesystem::path tmp = *save_file_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("cannot write save file " + tmp.string());
    }
    std::filesystem::rename(tmp, *save_file_);
}

std::vector<Combatant> spawn_enemies(const BattleScene& b) {
    std::vector<Combatant> enemies;
    for (int i = 0; i < b.count; ++i) {
        std::string name = archetype_display_name(b.enemy, b.level);
        if (b.count > 1) name += " #" + std::to_string(i + 1);
        enemies.push_back(make_combatant(CombatantId{kFirstEnemyId + static_cast<std::uint32_t>(i)}, b.enemy,
                                         Side::Enemy, b.level, std::move(name)));
    }
    return enemies;
}

std::optional<std::string> scripted_bot_input(const SessionState& s) {
    const std::vector<std::string> legal = legal_inputs(s);
    auto first_with = [&](std::string_view prefix) -> std::optional<std::string> {
        for (const std::string& id : legal)
            if (id.starts_with(prefix)) return id;
        return std::nullopt;
    };
    return std::visit(
        Overloaded{
            [&](const screen::MainMenu&) -> std::optional<std::string> { return "play"; },
            [&](const screen::About&) -> std::optional<std::string> { return "back"; },
            [&](const screen::Narration&) -> std::optional<std::string> { return "next"; },
            [&](const screen::Dialog&) -> std::optional<std::string> { return "next"; },
            [&](const screen::WeaponSelect& w) -> std::optional<std::string> {
                std::size_t best = 0;
                for (std::size_t i = 1; i < w.options.size(); ++i)
                    if (w.options[i].attack_bonus > w.options[best].attack_bonus) best = i;
                return "weapon:" + std::to_string(best);
            },
            [&](const screen::Quest& q) -> std::optional<std::string> {
                if (const auto* qq = std::get_if<Question>(&q.state.spec))
                    return "answer:" + std::to_string(qq->correct);
                if (auto g = first_with("gather:")) return g;
                if (auto c = first_with("combine")) return c;
                return first_with("search");
            },
            [&](const screen::Battle&) { return first_with("physical:"); },
            [&](const screen::ChapterComplete&) -> std::optional<std::string> { return "next"; },
            [&](const screen::Win&) -> std::optional<std::string> { return std::nullopt; },
            [&](const screen::Lose&) -> std::optional<std::string> { return "continue"; },
            [&](const screen::Exited&) -> std::optional<std::string> { return std::nullopt; },
        },
        s.screen);
}

} // namespace cursed
