#pragma once

// Command-line front end. run_cli takes explicit streams so tests can drive
// it in-process.

#include "cursed/campaign.hpp"
#include "cursed/session.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cursed {

struct ChapterBalance {
    std::string chapter;
    int battles = 0;
    double win_rate = 0.0;
    double mean_turns = 0.0;
    double mean_final_level = 0.0;
};

struct BalanceReport {
    std::vector<ChapterBalance> chapters;
};

/// n auto-played battles per battle scene, at the party a linear playthrough
/// would have. Throws std::invalid_argument for n < 1 and
/// SessionError(InvalidCampaign) for a campaign with errors.
BalanceReport simulate_balance(int n, std::uint64_t seed, const CampaignScript& campaign);

std::string format_report(const BalanceReport& r);

/// Text rendering of one view: title, text, party, numbered choices.
std::string render_view(const ViewModel& v);

/// Non-empty, non-comment lines of an inputs file, trimmed.
std::vector<std::string> read_inputs(std::istream& in);

/// args excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace cursed
