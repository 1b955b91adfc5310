#include "mvd/lang/lexer.hpp"

#include <cctype>
#include <charconv>

namespace mvd::lang {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

bool is_connective_word(std::string_view word) {
    return iequals(word, "AND") || iequals(word, "OR") || iequals(word, "XOR") ||
           iequals(word, "NOT");
}

namespace {

bool suppresses_following_newline(const Token& tok) {
    switch (tok.kind) {
        case Tok::Arrow:
        case Tok::Colon:
        case Tok::Compare:
        case Tok::Pipe:
            return true;
        case Tok::Ident:
            return tok.text == "as" || tok.text == "extends" || is_connective_word(tok.text);
        default:
            return false;
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    LexResult run() {
        while (pos_ < src_.size()) scan_one();
        // Trailing newline before End keeps the parser uniform.
        if (!result_.tokens.empty() && result_.tokens.back().kind != Tok::Newline)
            push_simple(Tok::Newline);
        Token end;
        end.kind = Tok::End;
        end.pos = here();
        result_.tokens.push_back(std::move(end));
        return std::move(result_);
    }

private:
    SourcePos here() const { return {line_, static_cast<std::uint32_t>(pos_ - line_start_ + 1)}; }

    void push_simple(Tok kind) {
        Token t;
        t.kind = kind;
        t.pos = here();
        result_.tokens.push_back(std::move(t));
    }

    void newline() {
        ++line_;
        line_start_ = pos_;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(here(), msg); }

    void scan_one() {
        char c = src_[pos_];
        if (c == '\n') {
            ++pos_;
            newline();
            const bool suppressed =
                depth_ > 0 ||
                result_.tokens.empty() ||
                result_.tokens.back().kind == Tok::Newline ||
                suppresses_following_newline(result_.tokens.back());
            if (!suppressed) push_simple(Tok::Newline);
            return;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++pos_;
            return;
        }
        if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
            SourcePos at = here();
            std::size_t end = src_.find('\n', pos_);
            if (end == std::string_view::npos) end = src_.size();
            result_.comments.push_back({at, std::string(src_.substr(pos_ + 2, end - pos_ - 2))});
            pos_ = end;
            return;
        }
        if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
            SourcePos at = here();
            std::size_t end = src_.find("*/", pos_ + 2);
            if (end == std::string_view::npos) fail("unterminated /* comment");
            result_.comments.push_back({at, std::string(src_.substr(pos_ + 2, end - pos_ - 2))});
            for (std::size_t i = pos_; i < end; ++i) {
                if (src_[i] == '\n') {
                    ++line_;
                    line_start_ = i + 1;
                }
            }
            pos_ = end + 2;
            return;
        }
        switch (c) {
            case '(': ++depth_; push_simple(Tok::LParen); ++pos_; return;
            case ')': if (depth_ > 0) --depth_; push_simple(Tok::RParen); ++pos_; return;
            case '[': ++depth_; push_simple(Tok::LBracket); ++pos_; return;
            case ']': if (depth_ > 0) --depth_; push_simple(Tok::RBracket); ++pos_; return;
            case ':': push_simple(Tok::Colon); ++pos_; return;
            case '|': push_simple(Tok::Pipe); ++pos_; return;
            case '\'': scan_string(); return;
            default: break;
        }
        if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
            push_simple(Tok::Arrow);
            pos_ += 2;
            return;
        }
        if (c == '=' || c == '!' || c == '>' || c == '<') {
            scan_comparator();
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '+') && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            scan_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            scan_ident();
            return;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    void scan_comparator() {
        Token t;
        t.kind = Tok::Compare;
        t.pos = here();
        char c = src_[pos_];
        char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
        if (c == '=') {
            t.cmp = Cmp::Eq;
            ++pos_;
        } else if (c == '!' && next == '=') {
            t.cmp = Cmp::Ne;
            pos_ += 2;
        } else if (c == '>' && next == '=') {
            t.cmp = Cmp::Ge;
            pos_ += 2;
        } else if (c == '<' && next == '=') {
            t.cmp = Cmp::Le;
            pos_ += 2;
        } else if (c == '>') {
            t.cmp = Cmp::Gt;
            ++pos_;
        } else if (c == '<') {
            t.cmp = Cmp::Lt;
            ++pos_;
        } else {
            fail("'!' must be followed by '='");
        }
        result_.tokens.push_back(std::move(t));
    }

    void scan_string() {
        Token t;
        t.kind = Tok::String;
        t.pos = here();
        ++pos_;  // opening quote
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') fail("unterminated string literal");
            char c = src_[pos_];
            if (c == '\'') {
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\'') {
                    t.text.push_back('\'');
                    pos_ += 2;
                    continue;
                }
                ++pos_;
                break;
            }
            t.text.push_back(c);
            ++pos_;
        }
        result_.tokens.push_back(std::move(t));
    }

    void scan_number() {
        Token t;
        t.pos = here();
        std::size_t start = pos_;
        if (src_[pos_] == '-' || src_[pos_] == '+') ++pos_;
        bool real = false;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '.' && pos_ + 1 < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                real = true;
                ++pos_;
            } else if ((c == 'e' || c == 'E') && pos_ + 1 < src_.size() &&
                       (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) ||
                        ((src_[pos_ + 1] == '-' || src_[pos_ + 1] == '+') && pos_ + 2 < src_.size() &&
                         std::isdigit(static_cast<unsigned char>(src_[pos_ + 2]))))) {
                real = true;
                pos_ += 2;
            } else {
                break;
            }
        }
        std::string_view digits = src_.substr(start, pos_ - start);
        if (real) {
            t.kind = Tok::Real;
            auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.rval);
            if (ec != std::errc()) fail("bad number literal '" + std::string(digits) + "'");
            (void)p;
        } else {
            t.kind = Tok::Int;
            auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.ival);
            if (ec != std::errc()) fail("bad integer literal '" + std::string(digits) + "'");
            (void)p;
        }
        result_.tokens.push_back(std::move(t));
    }

    void scan_ident() {
        Token t;
        t.kind = Tok::Ident;
        t.pos = here();
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        t.text = std::string(src_.substr(start, pos_ - start));
        result_.tokens.push_back(std::move(t));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1;
    std::size_t line_start_ = 0;
    int depth_ = 0;
    LexResult result_;
};

}  // namespace

LexResult lex(std::string_view source) { return Lexer(source).run(); }

}  // namespace mvd::lang
