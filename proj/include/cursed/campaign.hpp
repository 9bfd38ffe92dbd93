#pragma once

// questscript: the campaign DSL. Parser, canonical serializer, validator,
// quest evaluation and the bundled default campaign.

#include "cursed/rules.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cursed {

enum class Npc { King, Queen, Witch, Guard };

std::string_view to_string(Npc n) noexcept;
std::optional<Npc> parse_npc(std::string_view s) noexcept;

/// 1-based position in questscript source.
struct SourcePos {
    int line = 1;
    int column = 1;
    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

struct Narration {
    std::string text;
    friend bool operator==(const Narration&, const Narration&) = default;
};

struct Dialog {
    Npc npc = Npc::King;
    std::vector<std::string> lines;
    friend bool operator==(const Dialog&, const Dialog&) = default;
};

struct WeaponChoice {
    std::vector<Weapon> options;
    friend bool operator==(const WeaponChoice&, const WeaponChoice&) = default;
};

struct FetchItem {
    std::string item;
    std::optional<std::string> hint;
    friend bool operator==(const FetchItem&, const FetchItem&) = default;
};

struct CombineItems {
    std::vector<std::string> inputs;
    std::string output;
    friend bool operator==(const CombineItems&, const CombineItems&) = default;
};

struct Question {
    std::string prompt;
    std::vector<std::string> choices;
    int correct = 0;
    friend bool operator==(const Question&, const Question&) = default;
};

using QuestSpec = std::variant<FetchItem, CombineItems, Question>;

struct QuestScene {
    QuestSpec spec;
    friend bool operator==(const QuestScene&, const QuestScene&) = default;
};

struct BattleScene {
    Archetype enemy = Archetype::Monster;
    int level = 1;
    int count = 1;
    friend bool operator==(const BattleScene&, const BattleScene&) = default;
};

using SceneBody = std::variant<Narration, Dialog, WeaponChoice, QuestScene, BattleScene>;

/// Equality is structural: source positions are ignored.
struct Scene {
    SceneBody body;
    SourcePos pos;
    friend bool operator==(const Scene& a, const Scene& b) { return a.body == b.body; }
};

struct Chapter {
    std::string name;
    std::vector<Scene> scenes;
    SourcePos pos;
    friend bool operator==(const Chapter& a, const Chapter& b) {
        return a.name == b.name && a.scenes == b.scenes;
    }
};

struct CampaignScript {
    std::string title;
    std::vector<Chapter> chapters;
    friend bool operator==(const CampaignScript&, const CampaignScript&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    int line = 1;
    int column = 1;
    std::string message;
    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string format_diagnostic(const Diagnostic& d, std::string_view file = {});
std::size_t count_errors(const std::vector<Diagnostic>& diags) noexcept;

struct ParseResult {
    std::optional<CampaignScript> script;
    std::vector<Diagnostic> diagnostics;
    bool ok() const noexcept { return script.has_value(); }
};

/// Never throws for malformed input; problems are returned as diagnostics.
ParseResult parse_campaign(std::string_view source);

std::string serialize_campaign(const CampaignScript& script);

std::vector<Diagnostic> validate_campaign(const CampaignScript& script);

/// The bundled three-chapter campaign (Forest, Royal Gate, Palace).
const CampaignScript& default_campaign();
std::string_view default_campaign_source() noexcept;

// ---- quests ----

enum class QuestStatus { Open, Completed, Failed };

std::string_view to_string(QuestStatus s) noexcept;
std::optional<QuestStatus> parse_quest_status(std::string_view s) noexcept;

struct QuestState {
    QuestSpec spec;
    QuestStatus status = QuestStatus::Open;
    /// Collected items with multiplicity.
    std::map<std::string, int> inventory;
    friend bool operator==(const QuestState&, const QuestState&) = default;
};

struct PickUp {
    std::string item;
};
struct Combine {
    std::vector<std::string> items;
};
struct Answer {
    int index = 0;
};

using QuestAction = std::variant<PickUp, Combine, Answer>;

class QuestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

QuestState start_quest(QuestSpec spec);

/// Applies one player action. Throws QuestError (kind mismatch) when the
/// action does not fit the quest kind. Completed quests are left unchanged.
QuestState evaluate_quest(QuestState state, const QuestAction& action);

} // namespace cursed
