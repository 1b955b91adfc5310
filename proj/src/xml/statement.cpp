#include "mvd/xml/statement.hpp"

#include <cctype>

#include "mvd/lang/format.hpp"

namespace mvd::xml {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

// Statements are short, so the scanner works on the raw string: identifiers,
// bracketed metric names, comparators, quoted strings and numbers.
class Scanner {
  public:
    explicit Scanner(const std::string& text) : text_(text) {}

    void skip_space() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool done() {
        skip_space();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* where) {
        if (!accept(c))
            fail(std::string("expected '") + c + "' " + where);
    }

    bool at_ident() {
        skip_space();
        return pos_ < text_.size() &&
               (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_');
    }

    std::string ident() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) fail("expected an identifier");
        return text_.substr(start, pos_ - start);
    }

    // Peeks the next identifier without consuming it.
    std::string peek_ident() {
        std::size_t save = pos_;
        if (!at_ident()) return {};
        std::string word = ident();
        pos_ = save;
        return word;
    }

    lang::Cmp comparator() {
        skip_space();
        auto two = [&](char a, char b) {
            return pos_ + 1 < text_.size() && text_[pos_] == a && text_[pos_ + 1] == b;
        };
        if (two('!', '=')) { pos_ += 2; return lang::Cmp::Ne; }
        if (two('>', '=')) { pos_ += 2; return lang::Cmp::Ge; }
        if (two('<', '=')) { pos_ += 2; return lang::Cmp::Le; }
        if (two('<', '>')) { pos_ += 2; return lang::Cmp::Ne; }
        if (accept('=')) return lang::Cmp::Eq;
        if (accept('>')) return lang::Cmp::Gt;
        if (accept('<')) return lang::Cmp::Lt;
        fail("expected a comparator");
        return lang::Cmp::Eq;
    }

    bool at_comparator() {
        skip_space();
        if (pos_ >= text_.size()) return false;
        char c = text_[pos_];
        return c == '=' || c == '!' || c == '>' || c == '<';
    }

    lang::Literal literal() {
        skip_space();
        if (pos_ >= text_.size()) fail("expected a literal value");
        char c = text_[pos_];
        if (c == '\'' || c == '"') {
            char quote = c;
            ++pos_;
            std::string out;
            while (pos_ < text_.size()) {
                if (text_[pos_] == quote) {
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == quote) {
                        out.push_back(quote);
                        pos_ += 2;
                        continue;
                    }
                    ++pos_;
                    return lang::Literal::string(out);
                }
                out.push_back(text_[pos_++]);
            }
            fail("unterminated string literal");
        }
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            if (c == '-' || c == '+') ++pos_;
            bool real = false;
            while (pos_ < text_.size()) {
                char d = text_[pos_];
                if (std::isdigit(static_cast<unsigned char>(d))) { ++pos_; continue; }
                if (d == '.' || d == 'e' || d == 'E') { real = true; ++pos_; continue; }
                if ((d == '-' || d == '+') && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')) {
                    ++pos_;
                    continue;
                }
                break;
            }
            std::string num = text_.substr(start, pos_ - start);
            if (real) return lang::Literal::real(std::stod(num));
            return lang::Literal::integer(std::stoll(num));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word = ident();
            if (iequals(word, "TRUE")) return lang::Literal::boolean(true);
            if (iequals(word, "FALSE")) return lang::Literal::boolean(false);
            return lang::Literal::name(word);
        }
        fail("expected a literal value");
        return {};
    }

    [[noreturn]] void fail(const std::string& message) {
        throw StatementError("statement column " + std::to_string(pos_ + 1) + ": " + message +
                             " in \"" + text_ + "\"");
    }

  private:
    const std::string& text_;
    std::size_t pos_ = 0;
};

bool is_connective_word(const std::string& word) {
    return iequals(word, "AND") || iequals(word, "OR") || iequals(word, "XOR") ||
           iequals(word, "NOT");
}

class StatementParser {
  public:
    explicit StatementParser(const std::string& text) : sc_(text) {}

    Statement run() {
        Statement s = parse_or();
        if (!sc_.done()) sc_.fail("unexpected trailing text");
        return s;
    }

  private:
    Statement parse_or() { return parse_nary(lang::Connective::Or, "OR", [&] { return parse_xor(); }); }
    Statement parse_xor() { return parse_nary(lang::Connective::Xor, "XOR", [&] { return parse_and(); }); }
    Statement parse_and() { return parse_nary(lang::Connective::And, "AND", [&] { return parse_not(); }); }

    template <typename Next>
    Statement parse_nary(lang::Connective op, const char* word, Next next) {
        std::vector<Statement> kids;
        kids.push_back(next());
        while (iequals(sc_.peek_ident(), word)) {
            sc_.ident();
            kids.push_back(next());
        }
        if (kids.size() == 1) return std::move(kids.front());
        return Statement::group(op, std::move(kids));
    }

    Statement parse_not() {
        if (iequals(sc_.peek_ident(), "NOT")) {
            sc_.ident();
            std::vector<Statement> kid;
            kid.push_back(parse_not());
            return Statement::group(lang::Connective::Not, std::move(kid));
        }
        return parse_primary();
    }

    Statement parse_primary() {
        if (sc_.accept('(')) {
            Statement inner = parse_or();
            sc_.expect(')', "to close the group");
            return inner;
        }
        if (!sc_.at_ident()) sc_.fail("expected a RuleID or '('");
        std::string id = sc_.ident();
        if (is_connective_word(id)) sc_.fail("'" + id + "' is an operator, not a RuleID");
        Statement leaf = Statement::leaf(std::move(id));
        if (sc_.accept('[')) {
            std::string metric = sc_.ident();
            if (iequals(metric, "Type")) leaf.metric = lang::MetricKind::Type;
            else if (iequals(metric, "Value")) leaf.metric = lang::MetricKind::Value;
            else if (iequals(metric, "Size")) leaf.metric = lang::MetricKind::Size;
            else if (iequals(metric, "Exists")) leaf.metric = lang::MetricKind::Exists;
            else if (iequals(metric, "Unique")) leaf.metric = lang::MetricKind::Unique;
            else sc_.fail("unknown metric '" + metric + "'");
            sc_.expect(']', "after the metric name");
            leaf.cmp = sc_.comparator();
            leaf.value = sc_.literal();
            leaf.has_constraint = true;
        } else if (sc_.at_comparator()) {
            // RuleID = value is shorthand for RuleID[Value] = value.
            leaf.metric = lang::MetricKind::Value;
            leaf.cmp = sc_.comparator();
            leaf.value = sc_.literal();
            leaf.has_constraint = true;
        }
        return leaf;
    }

    Scanner sc_;
};

void format_into(std::string& out, const Statement& s, bool parenthesize) {
    if (s.kind == Statement::Kind::Leaf) {
        out += s.rule_id;
        if (s.has_constraint) {
            out.push_back('[');
            out += lang::to_string(s.metric);
            out.push_back(']');
            out += lang::to_string(s.cmp);
            out += lang::format(s.value);
        }
        return;
    }
    if (s.op == lang::Connective::Not) {
        out += "NOT ";
        format_into(out, s.children.front(), true);
        return;
    }
    if (parenthesize) out.push_back('(');
    for (std::size_t i = 0; i < s.children.size(); ++i) {
        if (i) {
            out.push_back(' ');
            out += lang::to_string(s.op);
            out.push_back(' ');
        }
        format_into(out, s.children[i], true);
    }
    if (parenthesize) out.push_back(')');
}

void collect_rule_ids(const Statement& s, std::vector<std::string>& out) {
    if (s.kind == Statement::Kind::Leaf) {
        for (const std::string& seen : out)
            if (seen == s.rule_id) return;
        out.push_back(s.rule_id);
        return;
    }
    for (const Statement& kid : s.children) collect_rule_ids(kid, out);
}

}  // namespace

Statement Statement::leaf(std::string rule_id) {
    Statement s;
    s.kind = Kind::Leaf;
    s.rule_id = std::move(rule_id);
    return s;
}

Statement Statement::leaf(std::string rule_id, lang::MetricKind m, lang::Cmp cmp,
                          lang::Literal value) {
    Statement s = leaf(std::move(rule_id));
    s.has_constraint = true;
    s.metric = m;
    s.cmp = cmp;
    s.value = std::move(value);
    return s;
}

Statement Statement::group(lang::Connective op, std::vector<Statement> children) {
    Statement s;
    s.kind = Kind::Group;
    s.op = op;
    s.children = std::move(children);
    return s;
}

bool operator==(const Statement& a, const Statement& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Statement::Kind::Leaf) {
        if (a.rule_id != b.rule_id || a.has_constraint != b.has_constraint) return false;
        if (!a.has_constraint) return true;
        return a.metric == b.metric && a.cmp == b.cmp && a.value == b.value;
    }
    return a.op == b.op && a.children == b.children;
}

Statement parse_statement(const std::string& text) { return StatementParser(text).run(); }

std::string format_statement(const Statement& s) {
    std::string out;
    format_into(out, s, false);
    return out;
}

std::vector<std::string> statement_rule_ids(const Statement& s) {
    std::vector<std::string> out;
    collect_rule_ids(s, out);
    return out;
}

}  // namespace mvd::xml
