#include "cursed/campaign.hpp"

#include "default_campaign_source.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

namespace cursed {

std::string_view to_string(Npc n) noexcept {
    switch (n) {
    case Npc::King: return "King";
    case Npc::Queen: return "Queen";
    case Npc::Witch: return "Witch";
    case Npc::Guard: return "Guard";
    }
    return "?";
}

std::optional<Npc> parse_npc(std::string_view s) noexcept {
    if (s == "King") return Npc::King;
    if (s == "Queen") return Npc::Queen;
    if (s == "Witch") return Npc::Witch;
    if (s == "Guard") return Npc::Guard;
    return std::nullopt;
}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
    std::ostringstream out;
    if (!file.empty()) out << file << ':';
    out << d.line << ':' << d.column << ": " << (d.severity == Severity::Error ? "error" : "warning") << ": "
        << d.message;
    return out.str();
}

std::size_t count_errors(const std::vector<Diagnostic>& diags) noexcept {
    return static_cast<std::size_t>(std::count_if(
        diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

// ---- serializer ----

namespace {

std::string quote(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string quoted_list(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += quote(items[i]);
    }
    return out;
}

void write_scene(std::ostream& out, const Scene& scene) {
    out << "  ";
    std::visit(Overloaded{
                   [&](const Narration& n) { out << "narration " << quote(n.text); },
                   [&](const Dialog& d) {
                       out << "dialog npc=" << to_string(d.npc) << ' ' << quoted_list(d.lines, " ");
                   },
                   [&](const WeaponChoice& w) {
                       out << "weapons ";
                       for (std::size_t i = 0; i < w.options.size(); ++i) {
                           const Weapon& opt = w.options[i];
                           if (i) out << ", ";
                           out << quote(opt.name) << " (";
                           if (opt.attack_bonus > 0)
                               out << "atk+" << opt.attack_bonus;
                           else
                               out << "mag+" << opt.magic_bonus;
                           out << ')';
                       }
                   },
                   [&](const QuestScene& q) {
                       out << "quest ";
                       std::visit(Overloaded{
                                      [&](const FetchItem& f) {
                                          out << "fetch item=" << quote(f.item);
                                          if (f.hint) out << " hint=" << quote(*f.hint);
                                      },
                                      [&](const CombineItems& c) {
                                          out << "combine " << quoted_list(c.inputs, ", ") << " -> "
                                              << quote(c.output);
                                      },
                                      [&](const Question& qq) {
                                          out << "question " << quote(qq.prompt)
                                              << " choices=" << quoted_list(qq.choices, ", ")
                                              << " correct=" << qq.correct;
                                      },
                                  },
                                  q.spec);
                   },
                   [&](const BattleScene& b) {
                       out << "battle monster=" << to_string(b.enemy) << " level=" << b.level
                           << " count=" << b.count;
                   },
               },
               scene.body);
    out << '\n';
}

} // namespace

std::string serialize_campaign(const CampaignScript& script) {
    std::ostringstream out;
    out << "campaign " << quote(script.title) << '\n';
    for (const Chapter& ch : script.chapters) {
        out << "\nchapter " << quote(ch.name) << " {\n";
        for (const Scene& s : ch.scenes) write_scene(out, s);
        out << "}\n";
    }
    return out.str();
}

// ---- validator ----

std::vector<Diagnostic> validate_campaign(const CampaignScript& script) {
    std::vector<Diagnostic> diags;
    auto error = [&](SourcePos p, std::string msg) {
        diags.push_back({Severity::Error, p.line, p.column, std::move(msg)});
    };
    auto warn = [&](SourcePos p, std::string msg) {
        diags.push_back({Severity::Warning, p.line, p.column, std::move(msg)});
    };

    if (script.chapters.empty()) {
        error({}, "campaign needs at least one chapter");
        return diags;
    }

    std::optional<int> previous_max;
    for (const Chapter& ch : script.chapters) {
        if (ch.scenes.empty()) {
            error(ch.pos, "chapter \"" + ch.name + "\" has no scenes");
            continue;
        }
        bool has_narration = false;
        std::optional<int> max_level;
        for (const Scene& s : ch.scenes) {
            if (std::holds_alternative<Narration>(s.body)) has_narration = true;
            if (const auto* b = std::get_if<BattleScene>(&s.body)) {
                if (b->level < 1) error(s.pos, "battle level must be >= 1");
                if (b->count < 1) error(s.pos, "battle count must be >= 1");
                if (b->enemy == Archetype::Prince) error(s.pos, "the Prince cannot be an enemy");
                max_level = std::max(max_level.value_or(b->level), b->level);
            }
            if (const auto* w = std::get_if<WeaponChoice>(&s.body)) {
                if (w->options.empty()) error(s.pos, "weapon choice needs at least one option");
                for (const Weapon& opt : w->options)
                    if (opt.attack_bonus < 0 || opt.magic_bonus < 0 ||
                        (opt.attack_bonus == 0) == (opt.magic_bonus == 0))
                        error(s.pos, "weapon \"" + opt.name + "\" needs exactly one positive bonus");
            }
            if (const auto* q = std::get_if<QuestScene>(&s.body)) {
                if (const auto* qq = std::get_if<Question>(&q->spec)) {
                    if (qq->choices.size() < 2) error(s.pos, "question needs at least two choices");
                    if (qq->correct < 0 || qq->correct >= static_cast<int>(qq->choices.size()))
                        error(s.pos, "question correct index " + std::to_string(qq->correct) + " out of range");
                }
                if (const auto* c = std::get_if<CombineItems>(&q->spec)) {
                    std::set<std::string> distinct(c->inputs.begin(), c->inputs.end());
                    if (c->inputs.size() < 2) error(s.pos, "combine needs at least two inputs");
                    if (distinct.size() != c->inputs.size()) error(s.pos, "combine inputs must be distinct");
                }
            }
        }
        if (!max_level) {
            error(ch.pos, "chapter \"" + ch.name + "\" has no battle");
        } else {
            if (previous_max && *max_level < *previous_max)
                error(ch.pos, "non-decreasing difficulty violated: chapter \"" + ch.name + "\" max level " +
                                  std::to_string(*max_level) + " < previous " + std::to_string(*previous_max));
            previous_max = max_level;
        }
        if (!has_narration) warn(ch.pos, "chapter \"" + ch.name + "\" has no narration");
    }

    const Chapter& last = script.chapters.back();
    const Scene* final_scene = last.scenes.empty() ? nullptr : &last.scenes.back();
    const auto* boss = final_scene ? std::get_if<BattleScene>(&final_scene->body) : nullptr;
    if (!boss || boss->enemy != Archetype::Witch)
        error(final_scene ? final_scene->pos : last.pos, "campaign must end with Witch battle");

    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    });
    return diags;
}

// ---- default campaign ----

std::string_view default_campaign_source() noexcept { return kDefaultCampaignSource; }

const CampaignScript& default_campaign() {
    static const CampaignScript script = [] {
        ParseResult r = parse_campaign(kDefaultCampaignSource);
        if (!r.script) throw std::logic_error("bundled campaign does not parse");
        return std::move(*r.script);
    }();
    return script;
}

// ---- quests ----

std::string_view to_string(QuestStatus s) noexcept {
    switch (s) {
    case QuestStatus::Open: return "Open";
    case QuestStatus::Completed: return "Completed";
    case QuestStatus::Failed: return "Failed";
    }
    return "?";
}

std::optional<QuestStatus> parse_quest_status(std::string_view s) noexcept {
    if (s == "Open") return QuestStatus::Open;
    if (s == "Completed") return QuestStatus::Completed;
    if (s == "Failed") return QuestStatus::Failed;
    return std::nullopt;
}

QuestState start_quest(QuestSpec spec) { return QuestState{std::move(spec), QuestStatus::Open, {}}; }

QuestState evaluate_quest(QuestState state, const QuestAction& action) {
    if (state.status == QuestStatus::Completed) return state;

    std::visit(
        Overloaded{
            [&](const PickUp& p) {
                if (std::holds_alternative<Question>(state.spec))
                    throw QuestError("kind mismatch: cannot pick up items in a question quest");
                ++state.inventory[p.item];
                if (const auto* f = std::get_if<FetchItem>(&state.spec); f && f->item == p.item)
                    state.status = QuestStatus::Completed;
            },
            [&](const Combine& c) {
                const auto* spec = std::get_if<CombineItems>(&state.spec);
                if (!spec) throw QuestError("kind mismatch: nothing to combine in this quest");
                const std::set<std::string> wanted(spec->inputs.begin(), spec->inputs.end());
                const std::set<std::string> offered(c.items.begin(), c.items.end());
                if (wanted != offered) return;
                for (const auto& item : wanted) {
                    auto it = state.inventory.find(item);
                    if (it == state.inventory.end() || it->second < 1) return;
                }
                for (const auto& item : wanted)
                    if (--state.inventory[item] == 0) state.inventory.erase(item);
                ++state.inventory[spec->output];
                state.status = QuestStatus::Completed;
            },
            [&](const Answer& a) {
                const auto* q = std::get_if<Question>(&state.spec);
                if (!q) throw QuestError("kind mismatch: this quest has no question");
                state.status = a.index == q->correct ? QuestStatus::Completed : QuestStatus::Failed;
            },
        },
        action);
    return state;
}

} // namespace cursed
