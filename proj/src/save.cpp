#include "cursed/session.hpp"

#include <boost/crc.hpp>

namespace cursed {

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

namespace {

using namespace codec;

Json progress_json(Progress p) { return Json::array({p.chapter, p.scene}); }

Progress progress_from(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw CodecError("progress must be a [chapter, scene] pair");
    return {j[0].get<int>(), j[1].get<int>()};
}

Json quest_spec_json(const QuestSpec& spec) {
    if (const auto* f = std::get_if<FetchItem>(&spec)) {
        Json j{{"kind", "fetch"}, {"item", f->item}};
        j["hint"] = f->hint ? Json(*f->hint) : Json(nullptr);
        return j;
    }
    if (const auto* c = std::get_if<CombineItems>(&spec))
        return {{"kind", "combine"}, {"inputs", c->inputs}, {"output", c->output}};
    const auto& q = std::get<Question>(spec);
    return {{"kind", "question"}, {"prompt", q.prompt}, {"choices", q.choices}, {"correct", q.correct}};
}

std::vector<std::string> string_list(const Json& obj, std::string_view name) {
    std::vector<std::string> out;
    for (const Json& v : get_array(obj, name)) {
        if (!v.is_string()) throw CodecError("field '" + std::string(name) + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

QuestSpec quest_spec_from(const Json& j) {
    const std::string kind = get_string(j, "kind");
    if (kind == "fetch") {
        FetchItem f{get_string(j, "item"), std::nullopt};
        const Json& hint = field(j, "hint");
        if (!hint.is_null()) f.hint = get_string(j, "hint");
        return f;
    }
    if (kind == "combine") return CombineItems{string_list(j, "inputs"), get_string(j, "output")};
    if (kind == "question") return Question{get_string(j, "prompt"), string_list(j, "choices"), get_int32(j, "correct")};
    throw CodecError("unknown quest kind '" + kind + "'");
}

Json quest_state_json(const QuestState& q) {
    Json inv = Json::object();
    for (const auto& [item, n] : q.inventory) inv[item] = n;
    return {{"spec", quest_spec_json(q.spec)}, {"status", to_string(q.status)}, {"inventory", std::move(inv)}};
}

QuestState quest_state_from(const Json& j) {
    QuestState q;
    q.spec = quest_spec_from(get_object(j, "spec"));
    auto status = parse_quest_status(get_string(j, "status"));
    if (!status) throw CodecError("unknown quest status");
    q.status = *status;
    for (const auto& [item, n] : get_object(j, "inventory").items()) {
        if (!n.is_number_integer() || n.get<long long>() < 1 || n.get<long long>() > 1'000'000)
            throw CodecError("inventory counts must be positive integers");
        q.inventory[item] = n.get<int>();
    }
    return q;
}

Json summary_json(const ChapterSummary& c) {
    return {{"chapter", c.chapter},
            {"exp_gained", c.exp_gained},
            {"monsters_defeated", c.monsters_defeated},
            {"level", c.level}};
}

ChapterSummary summary_from(const Json& j) {
    return {get_string(j, "chapter"), get_int32(j, "exp_gained"), get_int32(j, "monsters_defeated"),
            get_int32(j, "level")};
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json screen_json(const Screen& s) {
    Json j{{"kind", to_string(kind_of(s))}};
    std::visit(Overloaded{
                   [&](const screen::Narration& n) { j["text"] = n.text; },
                   [&](const screen::Dialog& d) {
                       j["npc"] = to_string(d.npc);
                       j["lines"] = d.lines;
                       j["cursor"] = d.cursor;
                   },
                   [&](const screen::WeaponSelect& w) {
                       Json opts = Json::array();
                       for (const auto& o : w.options) opts.push_back(to_json(o));
                       j["options"] = std::move(opts);
                   },
                   [&](const screen::Quest& q) { j["state"] = quest_state_json(q.state); },
                   [&](const screen::Battle& b) { j["battle"] = to_json(b.battle); },
                   [&](const screen::ChapterComplete& c) { j["summary"] = summary_json(c.summary); },
                   [](const auto&) {},
               },
               s);
    return j;
}

Screen screen_from(const Json& j) {
    const std::string kind = get_string(j, "kind");
    if (kind == "MainMenu") return screen::MainMenu{};
    if (kind == "About") return screen::About{};
    if (kind == "Narration") return screen::Narration{get_string(j, "text")};
    if (kind == "Dialog") {
        auto npc = parse_npc(get_string(j, "npc"));
        if (!npc) throw CodecError("unknown npc");
        screen::Dialog d{*npc, string_list(j, "lines"), get_int32(j, "cursor")};
        if (d.lines.empty() || d.cursor < 0 || d.cursor >= static_cast<int>(d.lines.size()))
            throw CodecError("dialog cursor out of range");
        return d;
    }
    if (kind == "WeaponSelect") {
        screen::WeaponSelect w;
        for (const Json& o : get_array(j, "options")) w.options.push_back(weapon_from_json(o));
        if (w.options.empty()) throw CodecError("weapon selection without options");
        return w;
    }
    if (kind == "Quest") return screen::Quest{quest_state_from(get_object(j, "state"))};
    if (kind == "Battle") return screen::Battle{battle_from_json(get_object(j, "battle"))};
    if (kind == "ChapterComplete") return screen::ChapterComplete{summary_from(get_object(j, "summary"))};
    if (kind == "Win") return screen::Win{};
    if (kind == "Lose") return screen::Lose{};
    if (kind == "Exited") return screen::Exited{};
    throw CodecError("unknown screen kind '" + kind + "'");
}

bool in_campaign(const CampaignScript& c, Progress p) {
    return p.chapter >= 0 && static_cast<std::size_t>(p.chapter) < c.chapters.size() && p.scene >= 0 &&
           static_cast<std::size_t>(p.scene) < c.chapters[static_cast<std::size_t>(p.chapter)].scenes.size();
}

} // namespace

Json session_to_json(const SessionState& s) {
    Json party = Json::array();
    for (const Combatant& c : s.party) party.push_back(to_json(c));
    Json quests = Json::array();
    for (const auto& [at, q] : s.quest_states) quests.push_back({{"at", progress_json(at)}, {"state", quest_state_json(q)}});
    Json j{{"campaign", serialize_campaign(s.campaign)},
           {"screen", screen_json(s.screen)},
           {"party", std::move(party)},
           {"progress", progress_json(s.progress)},
           {"last_reached", progress_json(s.last_reached)},
           {"quest_states", std::move(quests)},
           {"seed", s.seed},
           {"save_available", s.save_available},
           {"tally", summary_json(s.tally)}};
    j["save_slot"] = s.save_slot ? Json(*s.save_slot) : Json(nullptr);
    return j;
}

SessionState session_from_json(const Json& j) {
    SessionState s;
    ParseResult parsed = parse_campaign(get_string(j, "campaign"));
    if (!parsed.script) throw CodecError("embedded campaign does not parse");
    if (count_errors(validate_campaign(*parsed.script)) > 0) throw CodecError("embedded campaign is invalid");
    s.campaign = std::move(*parsed.script);
    s.screen = screen_from(get_object(j, "screen"));
    for (const Json& c : get_array(j, "party")) s.party.push_back(combatant_from_json(c));
    s.progress = progress_from(field(j, "progress"));
    s.last_reached = progress_from(field(j, "last_reached"));
    for (const Json& q : get_array(j, "quest_states")) {
        const Progress at = progress_from(field(q, "at"));
        if (!in_campaign(s.campaign, at)) throw CodecError("quest state outside the campaign");
        s.quest_states[at] = quest_state_from(get_object(q, "state"));
    }
    s.seed = get_u64(j, "seed");
    s.save_available = get_bool(j, "save_available");
    s.tally = summary_from(get_object(j, "tally"));
    const Json& slot = field(j, "save_slot");
    if (!slot.is_null()) s.save_slot = get_string(j, "save_slot");

    if (!in_campaign(s.campaign, s.progress) || !in_campaign(s.campaign, s.last_reached))
        throw CodecError("progress outside the campaign");
    if (s.party.empty()) throw CodecError("party is empty");
    for (const Combatant& c : s.party)
        if (c.side != Side::Player || !satisfies_invariants(c)) throw CodecError("party member violates invariants");
    if (const auto* b = std::get_if<screen::Battle>(&s.screen)) {
        for (const Combatant& c : b->battle.combatants)
            if (!satisfies_invariants(c)) throw CodecError("battle combatant violates invariants");
        if (!b->battle.side_alive(Side::Player) && !b->battle.winner)
            throw CodecError("battle without living party is not finished");
    }
    return s;
}

std::vector<std::uint8_t> save_session(const SessionState& s) {
    const std::string body = canonical(session_to_json(s));
    std::vector<std::uint8_t> out;
    out.reserve(9 + body.size());
    out.insert(out.end(), kSaveMagic.begin(), kSaveMagic.end());
    out.push_back(kSaveVersion);
    const std::uint32_t crc =
        crc32({reinterpret_cast<const std::uint8_t*>(body.data()), body.size()});
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(crc >> shift));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

SessionState load_session(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 9 || !std::equal(kSaveMagic.begin(), kSaveMagic.end(), bytes.begin()))
        throw SaveError(SaveErrc::MalformedBody, "not a save file (bad magic)");
    if (bytes[4] != kSaveVersion)
        throw SaveError(SaveErrc::UnknownVersion, "unknown save version " + std::to_string(bytes[4]));
    const std::uint32_t stored = (std::uint32_t{bytes[5]} << 24) | (std::uint32_t{bytes[6]} << 16) |
                                 (std::uint32_t{bytes[7]} << 8) | std::uint32_t{bytes[8]};
    const auto body = bytes.subspan(9);
    if (crc32(body) != stored) throw SaveError(SaveErrc::ChecksumMismatch, "save checksum mismatch");
    try {
        const Json j = Json::parse(body.begin(), body.end());
        return session_from_json(j);
    } catch (const Json::exception& e) {
        throw SaveError(SaveErrc::MalformedBody, std::string("malformed save body: ") + e.what());
    } catch (const CodecError& e) {
        throw SaveError(SaveErrc::MalformedBody, std::string("malformed save body: ") + e.what());
    }
}

namespace {

Json member_json(const MemberSummary& m) {
    Json j{{"id", m.id}, {"name", m.name},       {"hp", m.hp},
           {"max_hp", m.max_hp}, {"level", m.level}, {"exp", m.exp},
           {"exp_to_next", m.exp_to_next}};
    j["weapon"] = m.weapon ? Json(*m.weapon) : Json(nullptr);
    return j;
}

} // namespace

Json to_json(const ViewModel& v) {
    Json choices = Json::array();
    for (const Choice& c : v.choices) choices.push_back({{"id", c.id}, {"label", c.label}, {"enabled", c.enabled}});
    Json party = Json::array();
    for (const auto& m : v.party) party.push_back(member_json(m));
    Json foes = Json::array();
    for (const auto& m : v.foes) foes.push_back(member_json(m));
    return {{"screen", to_string(v.screen)}, {"title", v.title},     {"text", v.text},
            {"choices", std::move(choices)},  {"party", std::move(party)}, {"foes", std::move(foes)}};
}

Json to_json(const Event& e) {
    Json j{{"kind", to_string(e.kind)}, {"text", e.text}};
    if (e.attack) j["attack"] = to_json(*e.attack);
    return j;
}

} // namespace cursed
