#include "cursed/profile_store.hpp"

#include "cursed/rules.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace cursed {

Json to_json(const PlayerProfile& p) {
    return {{"name", p.name},
            {"total_exp", p.total_exp},
            {"level", p.level},
            {"monsters_defeated", p.monsters_defeated}};
}

PlayerProfile profile_from_json(const Json& j) {
    PlayerProfile p;
    p.name = codec::get_string(j, "name");
    p.total_exp = codec::get_int(j, "total_exp");
    p.level = codec::get_int32(j, "level");
    p.monsters_defeated = codec::get_int(j, "monsters_defeated");
    if (p.total_exp < 0 || p.monsters_defeated < 0 || p.level != level_for_total_exp(p.total_exp))
        throw CodecError("profile '" + p.name + "' violates the level/exp invariant");
    return p;
}

int exp_into_level(const PlayerProfile& p) noexcept {
    return static_cast<int>(p.total_exp - cumulative_exp(p.level));
}

namespace {

std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, const std::string& data, const std::filesystem::path& path) {
    const char* p = data.data();
    std::size_t left = data.size();
    while (left > 0) {
        const ssize_t n = ::write(fd, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StoreError("profile store unavailable: write to " + path.string() + " failed: " + errno_text());
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0)
        throw StoreError("profile store unavailable: fsync of " + path.string() + " failed: " + errno_text());
}

} // namespace

ProfileStore::ProfileStore(std::filesystem::path path) : path_(std::move(path)) {
    bool torn = false;
    std::ifstream in(path_, std::ios::binary);
    if (in) {
        const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        // Anything after the last newline was never fully appended.
        torn = !content.empty() && content.back() != '\n';
        std::vector<std::string> lines;
        std::istringstream text(content);
        for (std::string line; std::getline(text, line);)
            if (!line.empty()) lines.push_back(std::move(line));
        for (std::size_t i = 0; i < lines.size(); ++i) {
            try {
                PlayerProfile p = profile_from_json(Json::parse(lines[i]));
                profiles_[p.name] = std::move(p);
                ++log_lines_;
            } catch (const std::exception& e) {
                // A torn final line is what a crash mid-append leaves behind.
                if (i + 1 == lines.size()) {
                    torn = true;
                    break;
                }
                throw StoreError("profile store unavailable: corrupt record on line " + std::to_string(i + 1) +
                                 " of " + path_.string() + ": " + e.what());
            }
        }
    }
    open_for_append();
    if (torn || log_lines_ > 2 * profiles_.size() + 64) compact_locked();
}

ProfileStore::~ProfileStore() {
    if (fd_ >= 0) ::close(fd_);
}

void ProfileStore::open_for_append() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw StoreError("profile store unavailable: cannot open " + path_.string() + ": " + errno_text());
}

std::optional<PlayerProfile> ProfileStore::find(const std::string& name) const {
    std::lock_guard lock(mu_);
    auto it = profiles_.find(name);
    if (it == profiles_.end()) return std::nullopt;
    return it->second;
}

PlayerProfile ProfileStore::get_or_default(const std::string& name) const {
    if (auto p = find(name)) return *p;
    return PlayerProfile{name, 0, 1, 0};
}

PlayerProfile ProfileStore::record_result(const ProfileDelta& delta) {
    std::lock_guard lock(mu_);
    if (fd_ < 0) throw StoreError("profile store unavailable: store is closed");
    PlayerProfile p = profiles_.count(delta.name) ? profiles_[delta.name] : PlayerProfile{delta.name, 0, 1, 0};
    p.total_exp = std::max(0LL, p.total_exp + delta.exp);
    p.monsters_defeated = std::max(0LL, p.monsters_defeated + delta.monsters_defeated);
    p.level = level_for_total_exp(p.total_exp);
    append_line(canonical(to_json(p)) + "\n");
    profiles_[p.name] = p;
    ++log_lines_;
    if (log_lines_ > 2 * profiles_.size() + 64) compact_locked();
    return p;
}

void ProfileStore::append_line(const std::string& line) { write_all(fd_, line, path_); }

void ProfileStore::compact() {
    std::lock_guard lock(mu_);
    compact_locked();
}

void ProfileStore::compact_locked() {
    std::ostringstream body;
    for (const auto& [_, p] : profiles_) body << canonical(to_json(p)) << '\n';
    std::filesystem::path tmp = path_;
    tmp += ".compact";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw StoreError("profile store unavailable: cannot open " + tmp.string() + ": " + errno_text());
    try {
        write_all(fd, body.str(), tmp);
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    std::error_code ec;
    std::filesystem::rename(tmp, path_, ec);
    if (ec) throw StoreError("profile store unavailable: cannot replace " + path_.string() + ": " + ec.message());
    log_lines_ = profiles_.size();
    open_for_append();
}

std::size_t ProfileStore::size() const {
    std::lock_guard lock(mu_);
    return profiles_.size();
}

} // namespace cursed
