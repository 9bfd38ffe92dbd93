#include "cursed/campaign.hpp"

#include <charconv>
#include <limits>

namespace cursed {

namespace {

enum class Tok { String, Int, Ident, LBrace, RBrace, LParen, RParen, Comma, Equals, Plus, Arrow, End, Bad };

struct Token {
    Tok kind = Tok::End;
    std::string text; // decoded string contents, identifier or digits
    SourcePos pos;
};

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::String: return "string";
    case Tok::Int: return "integer '" + t.text + "'";
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Arrow: return "'->'";
    case Tok::End: return "end of input";
    case Tok::Bad: return "invalid character";
    }
    return "token";
}

// Length of the UTF-8 sequence starting at s[i], or 0 if invalid.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return 1;
    std::size_t len;
    std::uint32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return 0;
    }
    if (i + len > s.size()) return 0;
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return 0;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    return len;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next(std::vector<Diagnostic>& diags) {
        skip_trivia();
        Token t;
        t.pos = pos_;
        if (i_ >= src_.size()) {
            t.kind = Tok::End;
            return t;
        }
        const char c = src_[i_];
        auto single = [&](Tok k) {
            advance();
            t.kind = k;
            return t;
        };
        switch (c) {
        case '{': return single(Tok::LBrace);
        case '}': return single(Tok::RBrace);
        case '(': return single(Tok::LParen);
        case ')': return single(Tok::RParen);
        case ',': return single(Tok::Comma);
        case '=': return single(Tok::Equals);
        case '+': return single(Tok::Plus);
        case '"': return string_literal(t, diags);
        default: break;
        }
        if (c == '-' && i_ + 1 < src_.size() && src_[i_ + 1] == '>') {
            advance();
            advance();
            t.kind = Tok::Arrow;
            return t;
        }
        if (c >= '0' && c <= '9') {
            t.kind = Tok::Int;
            while (i_ < src_.size() && src_[i_] >= '0' && src_[i_] <= '9') {
                t.text.push_back(src_[i_]);
                advance();
            }
            return t;
        }
        if (is_ident_start(c)) {
            t.kind = Tok::Ident;
            while (i_ < src_.size() && is_ident_char(src_[i_])) {
                t.text.push_back(src_[i_]);
                advance();
            }
            return t;
        }
        diags.push_back({Severity::Error, t.pos.line, t.pos.column, "unexpected character"});
        advance();
        t.kind = Tok::Bad;
        return t;
    }

private:
    static bool is_ident_start(char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    }
    static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

    // Moves over one code point (source is already UTF-8 validated).
    void advance() {
        if (src_[i_] == '\n') {
            ++pos_.line;
            pos_.column = 1;
            ++i_;
            return;
        }
        i_ += utf8_sequence_length(src_, i_);
        ++pos_.column;
    }

    void skip_trivia() {
        while (i_ < src_.size()) {
            const char c = src_[i_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (i_ < src_.size() && src_[i_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token& string_literal(Token& t, std::vector<Diagnostic>& diags) {
        t.kind = Tok::String;
        advance(); // opening quote
        while (true) {
            if (i_ >= src_.size()) {
                diags.push_back({Severity::Error, t.pos.line, t.pos.column, "unterminated string"});
                t.kind = Tok::Bad;
                return t;
            }
            const char c = src_[i_];
            if (c == '"') {
                advance();
                return t;
            }
            if (c == '\\') {
                const SourcePos at = pos_;
                advance();
                if (i_ < src_.size() && (src_[i_] == '"' || src_[i_] == '\\')) {
                    t.text.push_back(src_[i_]);
                    advance();
                    continue;
                }
                diags.push_back({Severity::Error, at.line, at.column, "invalid escape sequence"});
                t.kind = Tok::Bad;
                // Resynchronise after the bad literal.
                while (i_ < src_.size() && src_[i_] != '"') advance();
                if (i_ < src_.size()) advance();
                return t;
            }
            const std::size_t len = src_[i_] == '\n' ? 1 : utf8_sequence_length(src_, i_);
            t.text.append(src_.substr(i_, len));
            advance();
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
    SourcePos pos_;
};

struct SyntaxError {
    SourcePos pos;
    std::string message;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { shift(); }

    ParseResult run() {
        ParseResult result;
        CampaignScript script;
        try {
            if (!is_ident("campaign")) fail(cur_.pos, "expected 'campaign' header");
            shift();
            script.title = expect_string("campaign title");
        } catch (const SyntaxError& e) {
            error(e.pos, e.message);
            result.diagnostics = std::move(diags_);
            return result;
        }

        do {
            if (!is_ident("chapter")) {
                error(cur_.pos, "expected 'chapter', found " + describe(cur_));
                break;
            }
            if (auto ch = chapter()) script.chapters.push_back(std::move(*ch));
        } while (cur_.kind != Tok::End && diags_.size() < kMaxDiagnostics);

        result.diagnostics = std::move(diags_);
        if (count_errors(result.diagnostics) == 0) result.script = std::move(script);
        return result;
    }

private:
    static constexpr std::size_t kMaxDiagnostics = 64;

    void shift() {
        cur_ = lexer_.next(diags_);
        while (cur_.kind == Tok::Bad && diags_.size() < kMaxDiagnostics) cur_ = lexer_.next(diags_);
        if (cur_.kind == Tok::Bad) cur_.kind = Tok::End;
    }

    [[noreturn]] static void fail(SourcePos pos, std::string message) {
        throw SyntaxError{pos, std::move(message)};
    }

    void error(SourcePos pos, std::string message) {
        diags_.push_back({Severity::Error, pos.line, pos.column, std::move(message)});
    }

    bool is_ident(std::string_view word) const { return cur_.kind == Tok::Ident && cur_.text == word; }

    bool is_scene_keyword() const {
        return is_ident("narration") || is_ident("dialog") || is_ident("weapons") || is_ident("quest") ||
               is_ident("battle");
    }

    void expect(Tok kind, std::string_view what) {
        if (cur_.kind != kind) fail(cur_.pos, "expected " + std::string(what) + ", found " + describe(cur_));
        shift();
    }

    void expect_word(std::string_view word) {
        if (!is_ident(word)) fail(cur_.pos, "expected '" + std::string(word) + "', found " + describe(cur_));
        shift();
    }

    std::string expect_string(std::string_view what) {
        if (cur_.kind != Tok::String)
            fail(cur_.pos, "expected " + std::string(what) + " string, found " + describe(cur_));
        std::string s = std::move(cur_.text);
        shift();
        return s;
    }

    std::string expect_ident(std::string_view what) {
        if (cur_.kind != Tok::Ident) fail(cur_.pos, "expected " + std::string(what) + ", found " + describe(cur_));
        std::string s = std::move(cur_.text);
        shift();
        return s;
    }

    int expect_int(std::string_view what) {
        if (cur_.kind != Tok::Int) fail(cur_.pos, "expected " + std::string(what) + ", found " + describe(cur_));
        int value = 0;
        const auto& s = cur_.text;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || ptr != s.data() + s.size()) fail(cur_.pos, "integer too large");
        shift();
        return value;
    }

    int expect_positive(std::string_view what) {
        const SourcePos at = cur_.pos;
        int v = expect_int(what);
        if (v < 1) fail(at, std::string(what) + " must be >= 1");
        return v;
    }

    void key(std::string_view word) {
        expect_word(word);
        expect(Tok::Equals, "'='");
    }

    std::optional<Chapter> chapter() {
        Chapter ch;
        ch.pos = cur_.pos;
        try {
            shift(); // 'chapter'
            ch.name = expect_string("chapter name");
            expect(Tok::LBrace, "'{'");
        } catch (const SyntaxError& e) {
            error(e.pos, e.message);
            // Skip to the next chapter header.
            while (cur_.kind != Tok::End && !is_ident("chapter")) shift();
            return std::nullopt;
        }

        bool ok = true;
        while (cur_.kind != Tok::RBrace) {
            if (cur_.kind == Tok::End) {
                error(cur_.pos, "expected '}' to close chapter \"" + ch.name + "\"");
                return std::nullopt;
            }
            if (diags_.size() >= kMaxDiagnostics) return std::nullopt;
            const SourcePos start = cur_.pos;
            try {
                ch.scenes.push_back(scene());
            } catch (const SyntaxError& e) {
                error(e.pos, e.message);
                ok = false;
                // Resynchronise on the next scene keyword or the chapter end.
                if (cur_.pos == start && cur_.kind != Tok::End && cur_.kind != Tok::RBrace) shift();
                while (cur_.kind != Tok::End && cur_.kind != Tok::RBrace && !is_scene_keyword() &&
                       !is_ident("chapter"))
                    shift();
                if (is_ident("chapter")) return std::nullopt;
            }
        }
        if (ch.scenes.empty()) {
            error(cur_.pos, "chapter \"" + ch.name + "\" needs at least one scene");
            ok = false;
        }
        shift(); // '}'
        if (!ok) return std::nullopt;
        return ch;
    }

    Scene scene() {
        Scene s;
        s.pos = cur_.pos;
        if (is_ident("narration")) {
            shift();
            s.body = Narration{expect_string("narration")};
        } else if (is_ident("dialog")) {
            shift();
            key("npc");
            const SourcePos at = cur_.pos;
            auto npc = parse_npc(expect_ident("npc name"));
            if (!npc) fail(at, "unknown npc (expected King, Queen, Witch or Guard)");
            Dialog d{*npc, {}};
            d.lines.push_back(expect_string("dialog line"));
            while (cur_.kind == Tok::String) {
                d.lines.push_back(std::move(cur_.text));
                shift();
            }
            s.body = std::move(d);
        } else if (is_ident("weapons")) {
            shift();
            WeaponChoice w;
            w.options.push_back(weapon());
            if (cur_.kind != Tok::Comma) fail(cur_.pos, "expected ',' and a second weapon");
            while (cur_.kind == Tok::Comma) {
                shift();
                w.options.push_back(weapon());
            }
            s.body = std::move(w);
        } else if (is_ident("quest")) {
            shift();
            s.body = QuestScene{quest_body()};
        } else if (is_ident("battle")) {
            shift();
            key("monster");
            const SourcePos at = cur_.pos;
            const std::string name = expect_ident("monster archetype");
            auto arch = parse_archetype(name);
            if (!arch || *arch == Archetype::Prince) fail(at, "unknown monster '" + name + "' (expected Monster or Witch)");
            BattleScene b;
            b.enemy = *arch;
            key("level");
            b.level = expect_positive("level");
            key("count");
            b.count = expect_positive("count");
            s.body = b;
        } else {
            fail(cur_.pos, "expected scene keyword, found " + describe(cur_));
        }
        return s;
    }

    Weapon weapon() {
        Weapon w;
        w.name = expect_string("weapon name");
        expect(Tok::LParen, "'('");
        const SourcePos at = cur_.pos;
        const std::string stat = expect_ident("'atk' or 'mag'");
        if (stat != "atk" && stat != "mag") fail(at, "expected 'atk' or 'mag'");
        expect(Tok::Plus, "'+'");
        const SourcePos bonus_at = cur_.pos;
        const int bonus = expect_int("weapon bonus");
        if (bonus < 1) fail(bonus_at, "weapon bonus must be > 0");
        (stat == "atk" ? w.attack_bonus : w.magic_bonus) = bonus;
        expect(Tok::RParen, "')'");
        return w;
    }

    QuestSpec quest_body() {
        if (is_ident("fetch")) {
            shift();
            key("item");
            FetchItem f;
            f.item = expect_string("item name");
            if (is_ident("hint")) {
                key("hint");
                f.hint = expect_string("hint");
            }
            return f;
        }
        if (is_ident("combine")) {
            shift();
            CombineItems c;
            c.inputs.push_back(expect_string("item name"));
            if (cur_.kind != Tok::Comma) fail(cur_.pos, "expected ',' and a second item to combine");
            while (cur_.kind == Tok::Comma) {
                shift();
                c.inputs.push_back(expect_string("item name"));
            }
            expect(Tok::Arrow, "'->'");
            c.output = expect_string("combined item name");
            return c;
        }
        if (is_ident("question")) {
            shift();
            Question q;
            q.prompt = expect_string("question prompt");
            key("choices");
            q.choices.push_back(expect_string("choice"));
            if (cur_.kind != Tok::Comma) fail(cur_.pos, "expected ',' and a second choice");
            while (cur_.kind == Tok::Comma) {
                shift();
                q.choices.push_back(expect_string("choice"));
            }
            key("correct");
            q.correct = expect_int("correct choice index");
            return q;
        }
        fail(cur_.pos, "expected 'fetch', 'combine' or 'question', found " + describe(cur_));
    }

    Lexer lexer_;
    Token cur_;
    std::vector<Diagnostic> diags_;
};

} // namespace

ParseResult parse_campaign(std::string_view source) {
    SourcePos pos;
    for (std::size_t i = 0; i < source.size();) {
        if (source[i] == '\n') {
            ++pos.line;
            pos.column = 1;
            ++i;
            continue;
        }
        const std::size_t len = utf8_sequence_length(source, i);
        if (len == 0) {
            ParseResult r;
            r.diagnostics.push_back({Severity::Error, pos.line, pos.column, "invalid UTF-8 byte sequence"});
            return r;
        }
        i += len;
        ++pos.column;
    }
    return Parser(source).run();
}

} // namespace cursed
