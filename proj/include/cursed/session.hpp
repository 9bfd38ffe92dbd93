#pragma once

// Single-player game flow: a finite state machine over screens, driven one
// labelled input at a time, plus versioned save files.

#include "cursed/campaign.hpp"
#include "cursed/codec.hpp"
#include "cursed/rules.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cursed {

struct Progress {
    int chapter = 0;
    int scene = 0;
    friend auto operator<=>(const Progress&, const Progress&) = default;
};

struct ChapterSummary {
    std::string chapter;
    int exp_gained = 0;
    int monsters_defeated = 0;
    int level = 1;
    friend bool operator==(const ChapterSummary&, const ChapterSummary&) = default;
};

namespace screen {

struct MainMenu {
    friend bool operator==(const MainMenu&, const MainMenu&) = default;
};
struct About {
    friend bool operator==(const About&, const About&) = default;
};
struct Narration {
    std::string text;
    friend bool operator==(const Narration&, const Narration&) = default;
};
struct Dialog {
    Npc npc = Npc::King;
    std::vector<std::string> lines;
    int cursor = 0;
    friend bool operator==(const Dialog&, const Dialog&) = default;
};
struct WeaponSelect {
    std::vector<Weapon> options;
    friend bool operator==(const WeaponSelect&, const WeaponSelect&) = default;
};
struct Quest {
    QuestState state;
    friend bool operator==(const Quest&, const Quest&) = default;
};
struct Battle {
    cursed::Battle battle;
    friend bool operator==(const Battle&, const Battle&) = default;
};
struct ChapterComplete {
    ChapterSummary summary;
    friend bool operator==(const ChapterComplete&, const ChapterComplete&) = default;
};
struct Win {
    friend bool operator==(const Win&, const Win&) = default;
};
struct Lose {
    friend bool operator==(const Lose&, const Lose&) = default;
};
struct Exited {
    friend bool operator==(const Exited&, const Exited&) = default;
};

} // namespace screen

using Screen = std::variant<screen::MainMenu, screen::About, screen::Narration, screen::Dialog,
                            screen::WeaponSelect, screen::Quest, screen::Battle, screen::ChapterComplete,
                            screen::Win, screen::Lose, screen::Exited>;

enum class ScreenKind {
    MainMenu,
    About,
    Narration,
    Dialog,
    WeaponSelect,
    Quest,
    Battle,
    ChapterComplete,
    Win,
    Lose,
    Exited,
};

ScreenKind kind_of(const Screen& s) noexcept;
std::string_view to_string(ScreenKind k) noexcept;

struct SessionState {
    Screen screen;
    CampaignScript campaign;
    std::vector<Combatant> party;
    Progress progress;
    Progress last_reached;
    std::map<Progress, QuestState> quest_states;
    std::uint64_t seed = 0;
    std::optional<std::string> save_slot;
    /// Whether "continue" on the main menu has a save to resume.
    bool save_available = false;
    /// EXP and kills accumulated in the current chapter.
    ChapterSummary tally;

    friend bool operator==(const SessionState&, const SessionState&) = default;
};

enum class EventKind {
    SceneEntered,
    SceneCompleted,
    Autosave,
    Attack,
    LevelUp,
    WeaponEquipped,
    QuestProgress,
    QuestCompleted,
    QuestFailed,
    BattleWon,
    Defeat,
    ChapterCompleted,
    Victory,
    Retry,
    LoadRequested,
    MultiplayerRequested,
    Exited,
};

std::string_view to_string(EventKind k) noexcept;

struct Event {
    EventKind kind = EventKind::SceneEntered;
    std::string text;
    std::optional<BattleEvent> attack;
    friend bool operator==(const Event&, const Event&) = default;
};

enum class SessionErrc { InvalidCampaign, IllegalInput, NoSave };

class SessionError : public std::runtime_error {
public:
    SessionError(SessionErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    SessionErrc code() const noexcept { return code_; }

private:
    SessionErrc code_;
};

struct Choice {
    std::string id;
    std::string label;
    bool enabled = true;
    friend bool operator==(const Choice&, const Choice&) = default;
};

struct MemberSummary {
    std::uint32_t id = 0;
    std::string name;
    int hp = 0;
    int max_hp = 0;
    int level = 1;
    int exp = 0;
    int exp_to_next = 0;
    std::optional<std::string> weapon;
    friend bool operator==(const MemberSummary&, const MemberSummary&) = default;
};

struct ViewModel {
    ScreenKind screen = ScreenKind::MainMenu;
    std::string title;
    std::vector<std::string> text;
    std::vector<Choice> choices;
    std::vector<MemberSummary> party;
    std::vector<MemberSummary> foes;
    friend bool operator==(const ViewModel&, const ViewModel&) = default;
};

struct Transition {
    SessionState state;
    std::vector<Event> events;
};

/// Throws SessionError(InvalidCampaign) if the campaign has validation errors.
SessionState new_session(CampaignScript campaign, std::uint64_t seed);

/// Total transition function. Throws SessionError(IllegalInput) for inputs
/// not currently offered and SessionError(NoSave) for "continue" without a
/// save; the caller's state is never modified.
Transition handle_input(SessionState s, std::string_view input);

ViewModel current_view(const SessionState& s);

/// Ids of the enabled choices of the current view.
std::vector<std::string> legal_inputs(const SessionState& s);

/// Enemies of a battle scene, ids from 101.
std::vector<Combatant> spawn_enemies(const BattleScene& b);

/// Always-physical bot: lowest-id target, strongest attack weapon, correct
/// answers, retries on defeat. nullopt once the game is over.
std::optional<std::string> scripted_bot_input(const SessionState& s);

Json to_json(const ViewModel& v);
Json to_json(const Event& e);

// ---- FSM edge table ----

/// Where an edge leads.
enum class Dest {
    Stay,             ///< same screen kind (cursor, retry, driver-handled request)
    MainMenu,
    About,
    Exited,
    FirstScene,       ///< screen of scene (0, 0)
    NextScene,        ///< next scene, ChapterComplete at chapter end, Win at campaign end
    NextChapter,      ///< first scene of the following chapter
    LastReached,      ///< screen of the scene at last_reached
    Lose,
};

struct FsmEdge {
    ScreenKind from;
    std::string_view input; ///< exact id, or a prefix ending in ':'
    std::vector<Dest> to;
};

const std::vector<FsmEdge>& fsm_edges();

// ---- saves ----

inline constexpr std::uint8_t kSaveVersion = 1;
inline constexpr std::string_view kSaveMagic = "CPSV";

enum class SaveErrc { UnknownVersion, ChecksumMismatch, MalformedBody };

class SaveError : public std::runtime_error {
public:
    SaveError(SaveErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    SaveErrc code() const noexcept { return code_; }

private:
    SaveErrc code_;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

Json session_to_json(const SessionState& s);
SessionState session_from_json(const Json& j);

std::vector<std::uint8_t> save_session(const SessionState& s);
SessionState load_session(std::span<const std::uint8_t> bytes);

/// Owns one session and its save file; applies Autosave and LoadRequested.
class SessionDriver {
public:
    SessionDriver(CampaignScript campaign, std::uint64_t seed,
                  std::optional<std::filesystem::path> save_file = std::nullopt,
                  std::optional<std::string> slot_name = std::nullopt);

    const SessionState& state() const noexcept { return state_; }
    ViewModel view() const { return current_view(state_); }

    /// Applies one input; on failure the state is left as it was.
    std::vector<Event> input(std::string_view choice);

private:
    void write_save();

    SessionState state_;
    std::optional<std::filesystem::path> save_file_;
};

} // namespace cursed
