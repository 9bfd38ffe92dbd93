#include "cursed/cli.hpp"

#include "cursed/arena_server.hpp"
#include "cursed/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace cursed {

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUsage = 2;

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct Loaded {
    std::optional<CampaignScript> script;
    int code = kOk;
};

// Parse + validate a campaign file; diagnostics go to err.
Loaded load_campaign(const std::optional<std::string>& path, std::ostream& err) {
    if (!path) return {default_campaign(), kOk};
    auto text = read_file(*path);
    if (!text) {
        err << "error: cannot read " << *path << '\n';
        return {std::nullopt, kUsage};
    }
    ParseResult pr = parse_campaign(*text);
    for (const Diagnostic& d : pr.diagnostics) err << format_diagnostic(d, *path) << '\n';
    if (!pr.ok()) return {std::nullopt, kInvalid};
    const auto diags = validate_campaign(*pr.script);
    for (const Diagnostic& d : diags) err << format_diagnostic(d, *path) << '\n';
    if (count_errors(diags) > 0) return {std::nullopt, kInvalid};
    return {std::move(pr.script), kOk};
}

std::string member_line(const MemberSummary& m) {
    std::ostringstream o;
    o << m.name << "  L" << m.level << "  hp " << m.hp << '/' << m.max_hp;
    if (m.exp_to_next > 0) o << "  exp " << m.exp << '/' << m.exp_to_next;
    if (m.weapon) o << "  [" << *m.weapon << ']';
    return o.str();
}

// Maps "3" to the third listed choice; anything else is taken as an id.
std::string resolve_choice(const ViewModel& v, const std::string& line) {
    if (!line.empty() && std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isdigit(c); })) {
        const auto n = std::stoul(line);
        if (n >= 1 && n <= v.choices.size()) return v.choices[n - 1].id;
    }
    return line;
}

int cmd_play(const std::optional<std::string>& campaign, const std::optional<std::string>& save, std::uint64_t seed,
             std::istream& in, std::ostream& out, std::ostream& err) {
    Loaded l = load_campaign(campaign, err);
    if (!l.script) return l.code;
    std::optional<std::filesystem::path> save_file;
    if (save) save_file = *save;
    SessionDriver driver(std::move(*l.script), seed, save_file);
    out << render_view(driver.view()) << std::flush;
    for (std::string line; std::getline(in, line);) {
        line = trim(line);
        if (line.empty()) continue;
        try {
            for (const Event& e : driver.input(resolve_choice(driver.view(), line))) {
                if (e.kind == EventKind::MultiplayerRequested)
                    out << "* multiplayer runs on the arena server: start `serve` and connect a client\n";
                else if (!e.text.empty() && e.kind != EventKind::Autosave)
                    out << "* " << e.text << '\n';
            }
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
        }
        if (driver.view().screen == ScreenKind::Exited) break;
        out << '\n' << render_view(driver.view()) << std::flush;
    }
    return kOk;
}

int cmd_replay(const std::string& inputs_path, std::uint64_t seed, const std::optional<std::string>& campaign,
               std::ostream& out, std::ostream& err) {
    std::ifstream f(inputs_path);
    if (!f) {
        err << "error: cannot read " << inputs_path << '\n';
        return kUsage;
    }
    Loaded l = load_campaign(campaign, err);
    if (!l.script) return l.code;
    SessionDriver driver(std::move(*l.script), seed);
    std::size_t n = 0;
    for (const std::string& input : read_inputs(f)) {
        ++n;
        try {
            driver.input(input);
        } catch (const std::exception& e) {
            err << inputs_path << ": input " << n << " '" << input << "': " << e.what() << '\n';
            out << to_string(driver.view().screen) << '\n';
            return kInvalid;
        }
    }
    out << to_string(driver.view().screen) << '\n';
    return kOk;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    auto text = read_file(path);
    if (!text) {
        err << "error: cannot read " << path << '\n';
        return kUsage;
    }
    ParseResult pr = parse_campaign(*text);
    std::vector<Diagnostic> diags = pr.diagnostics;
    if (pr.ok()) {
        auto more = validate_campaign(*pr.script);
        diags.insert(diags.end(), more.begin(), more.end());
    }
    for (const Diagnostic& d : diags) err << format_diagnostic(d, path) << '\n';
    const std::size_t errors = count_errors(diags);
    out << path << ": " << errors << (errors == 1 ? " error, " : " errors, ") << diags.size() - errors
        << (diags.size() - errors == 1 ? " warning" : " warnings") << '\n';
    return errors > 0 ? kInvalid : kOk;
}

int cmd_simulate(int battles, std::uint64_t seed, const std::optional<std::string>& campaign, std::ostream& out,
                 std::ostream& err) {
    Loaded l = load_campaign(campaign, err);
    if (!l.script) return l.code;
    out << format_report(simulate_balance(battles, seed, *l.script));
    return kOk;
}

int cmd_serve(const ServerConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        ArenaServer server(cfg);
        out << "listening on port " << server.port() << std::endl;
        server.run();
    } catch (const std::exception& e) {
        err << "serve: " << e.what() << '\n';
        return kInvalid;
    }
    return kOk;
}

} // namespace

BalanceReport simulate_balance(int n, std::uint64_t seed, const CampaignScript& campaign) {
    if (n < 1) throw std::invalid_argument("battles per scene must be at least 1");
    if (count_errors(validate_campaign(campaign)) > 0)
        throw SessionError(SessionErrc::InvalidCampaign, "campaign has validation errors");

    Combatant prince = make_combatant(CombatantId{1}, Archetype::Prince, Side::Player, 1, "Prince");
    BalanceReport report;
    std::uint64_t scene_no = 0;
    for (const Chapter& ch : campaign.chapters) {
        ChapterBalance row{ch.name};
        int wins = 0;
        long long turns = 0;
        long long levels = 0;
        for (const Scene& sc : ch.scenes) {
            ++scene_no;
            if (const auto* w = std::get_if<WeaponChoice>(&sc.body)) {
                prince.weapon = *std::max_element(w->options.begin(), w->options.end(),
                                                  [](const Weapon& a, const Weapon& b) {
                                                      return a.attack_bonus < b.attack_bonus;
                                                  });
                continue;
            }
            const auto* b = std::get_if<BattleScene>(&sc.body);
            if (!b) continue;
            std::optional<Combatant> next;
            for (int i = 0; i < n; ++i) {
                Battle battle = start_battle({prince}, spawn_enemies(*b), keyed_draw(seed, scene_no, i));
                while (!battle.winner) {
                    CombatantId target;
                    for (const Combatant& c : battle.combatants)
                        if (c.side == Side::Enemy && c.alive() && (target.value == 0 || c.id < target)) target = c.id;
                    battle = submit_action(std::move(battle), Action{AttackKind::Physical, target});
                }
                const BattleResult r = conclude_battle(battle);
                ++row.battles;
                turns += r.turns;
                int level = prince.level;
                if (r.winner == Side::Player) {
                    ++wins;
                    level = r.survivors.front().level;
                    if (!next) next = r.survivors.front();
                }
                levels += level;
            }
            // The linear playthrough keeps the first win's progress.
            if (next) {
                prince = *next;
                prince.hp = prince.stats.max_hp;
            }
        }
        if (row.battles > 0) {
            row.win_rate = static_cast<double>(wins) / row.battles;
            row.mean_turns = static_cast<double>(turns) / row.battles;
            row.mean_final_level = static_cast<double>(levels) / row.battles;
        }
        report.chapters.push_back(std::move(row));
    }
    return report;
}

std::string format_report(const BalanceReport& r) {
    std::size_t w = 7;
    for (const auto& c : r.chapters) w = std::max(w, c.chapter.size());
    std::ostringstream o;
    o << std::left << std::setw(static_cast<int>(w)) << "chapter" << std::right << std::setw(9) << "battles"
      << std::setw(10) << "win rate" << std::setw(12) << "mean turns" << std::setw(12) << "mean level" << '\n';
    o << std::fixed << std::setprecision(2);
    for (const auto& c : r.chapters)
        o << std::left << std::setw(static_cast<int>(w)) << c.chapter << std::right << std::setw(9) << c.battles
          << std::setw(10) << c.win_rate << std::setw(12) << c.mean_turns << std::setw(12) << c.mean_final_level
          << '\n';
    return o.str();
}

std::string render_view(const ViewModel& v) {
    std::ostringstream o;
    o << "== " << (v.title.empty() ? std::string(to_string(v.screen)) : v.title) << " ==\n";
    for (const std::string& line : v.text) o << line << '\n';
    for (const auto& m : v.party) o << "  you: " << member_line(m) << '\n';
    for (const auto& m : v.foes) o << "  foe: " << member_line(m) << '\n';
    for (std::size_t i = 0; i < v.choices.size(); ++i) {
        const Choice& c = v.choices[i];
        o << "  " << i + 1 << ") " << c.label << "  [" << c.id << ']';
        if (!c.enabled) o << " (unavailable)";
        o << '\n';
    }
    return o.str();
}

std::vector<std::string> read_inputs(std::istream& in) {
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (!line.empty()) out.push_back(std::move(line));
    }
    return out;
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"The Cursed Prince: campaign engine and arena server", "cursed_prince"};
    app.require_subcommand(1);

    std::optional<std::string> campaign;
    std::optional<std::string> save;
    std::uint64_t seed = 0;
    auto* play = app.add_subcommand("play", "Play the campaign in the terminal");
    play->add_option("--campaign", campaign, "Campaign file (default: built-in)")->check(CLI::ExistingFile);
    play->add_option("--save", save, "Save file for autosave and continue");
    play->add_option("--seed", seed, "Battle seed");

    std::string inputs;
    auto* replay = app.add_subcommand("replay", "Feed labelled choices from a file and print the final screen");
    replay->add_option("--inputs", inputs, "Inputs file, one choice per line")->required();
    replay->add_option("--seed", seed, "Battle seed")->required();
    replay->add_option("--campaign", campaign, "Campaign file (default: built-in)")->check(CLI::ExistingFile);

    std::string path;
    auto* validate = app.add_subcommand("validate", "Parse and validate a campaign file");
    validate->add_option("path", path, "Campaign file")->required();

    int battles = 0;
    auto* simulate = app.add_subcommand("simulate", "Balance report from auto-played battles");
    simulate->add_option("--battles", battles, "Battles per battle scene")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "Seed")->required();
    simulate->add_option("--campaign", campaign, "Campaign file (default: built-in)")->check(CLI::ExistingFile);

    ServerConfig cfg;
    std::string static_dir;
    auto* serve = app.add_subcommand("serve", "Run the multiplayer arena server");
    serve->add_option("--port", cfg.port, "TCP port (0 picks one)")->required();
    serve->add_option("--db", cfg.db, "Profile database file")->required();
    serve->add_option("--tick-ms", cfg.tick_ms, "Tick length in milliseconds")->default_val(500)->check(CLI::PositiveNumber);
    serve->add_option("--static", static_dir, "Directory served over HTTP")->check(CLI::ExistingDirectory);
    serve->add_option("--seed", cfg.seed, "Room seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kUsage;
    }

    if (play->parsed()) return cmd_play(campaign, save, seed, in, out, err);
    if (replay->parsed()) return cmd_replay(inputs, seed, campaign, out, err);
    if (validate->parsed()) return cmd_validate(path, out, err);
    if (simulate->parsed()) return cmd_simulate(battles, seed, campaign, out, err);
    if (!static_dir.empty()) cfg.static_dir = static_dir;
    return cmd_serve(cfg, out, err);
}

} // namespace cursed
