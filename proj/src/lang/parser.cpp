// Recursive-descent parser for MVDLite.  One statement per (logical)
// line; definition/constraint headers open blocks and subsequent chain
// lines attach to them.  Compound connective precedence, tightest first:
// NOT, AND, XOR, OR.

#include "mvd/lang/parser.hpp"

#include <algorithm>

namespace mvd::lang {

namespace {

const char* token_name(Tok t) {
    switch (t) {
        case Tok::End: return "end of file";
        case Tok::Newline: return "end of line";
        case Tok::Arrow: return "'->'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Colon: return "':'";
        case Tok::Pipe: return "'|'";
        case Tok::Compare: return "comparator";
        case Tok::Ident: return "identifier";
        case Tok::String: return "string";
        case Tok::Int: return "integer";
        case Tok::Real: return "number";
    }
    return "?";
}

class Parser {
public:
    Parser(LexResult lexed) : tokens_(std::move(lexed.tokens)) {
        result_.comments = std::move(lexed.comments);
        for (std::size_t i = 0; i < result_.comments.size(); ++i) {
            const CommentInfo& c = result_.comments[i];
            std::string trimmed = c.text;
            trimmed.erase(0, trimmed.find_first_not_of(" \t"));
            if (trimmed.empty() || trimmed[0] != '{') continue;
            nlohmann::json parsed = nlohmann::json::parse(trimmed, nullptr, false);
            if (parsed.is_object()) tag_comments_.push_back({c.pos.line, std::move(parsed), false});
        }
    }

    RuleSet run() {
        while (!at(Tok::End)) {
            if (accept(Tok::Newline)) continue;
            statement();
        }
        result_.stage = Stage::Parsed;
        return std::move(result_);
    }

private:
    enum class Block { None, Definition, Constraint };

    struct TagComment {
        std::uint32_t line;
        nlohmann::json data;
        bool consumed;
    };

    // --- token helpers ----------------------------------------------------
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    bool at(Tok kind) const { return peek().kind == kind; }
    const Token& advance() { return tokens_[pos_++]; }
    bool accept(Tok kind) {
        if (!at(kind)) return false;
        ++pos_;
        return true;
    }
    const Token& expect(Tok kind, const char* context) {
        if (!at(kind))
            throw ParseError(peek().pos, std::string("expected ") + token_name(kind) + " " +
                                             context + ", got " + token_name(peek().kind));
        return advance();
    }
    void end_statement() {
        if (at(Tok::End)) return;
        expect(Tok::Newline, "to end the statement");
    }

    bool at_keyword(const char* word) const {
        return at(Tok::Ident) && peek().text == word;  // keywords are lower-case
    }

    TagInfo take_tag(std::uint32_t line) {
        TagInfo tag;
        TagComment* best = nullptr;
        for (TagComment& c : tag_comments_)
            if (!c.consumed && c.line <= line) best = &c;
        if (best) {
            best->consumed = true;
            tag.present = true;
            tag.data = best->data;
        }
        return tag;
    }

    // --- statements -------------------------------------------------------
    void statement() {
        const Token& t = peek();
        if (at_keyword("schema")) {
            advance();
            const Token& id = expect(Tok::Ident, "after 'schema'");
            if (result_.schema_id)
                throw ParseError(t.pos, "duplicate schema declaration");
            result_.schema_id = id.text;
            end_statement();
            return;
        }
        if (at_keyword("definition")) {
            advance();
            SourcePos at_pos = t.pos;
            const Token& id = expect(Tok::Ident, "after 'definition'");
            std::string name = id.text;
            std::optional<std::string> parent;
            if (at_keyword("extends")) {
                advance();
                parent = expect(Tok::Ident, "after 'extends'").text;
            }
            end_statement();
            int idx = find_concept(name);
            if (idx >= 0 && !result_.concepts[idx].definition_rules.empty())
                throw ParseError(at_pos, "duplicate definition block for '" + name + "'");
            if (idx >= 0 && result_.concepts[idx].extends && parent)
                throw ParseError(at_pos, "'" + name + "' already has a parent");
            if (idx < 0) idx = new_concept(name, at_pos);
            ConceptDef& concept_def = result_.concepts[idx];
            if (parent) concept_def.extends = std::move(parent);
            TagInfo tag = take_tag(at_pos.line);
            if (tag.present) concept_def.tag = std::move(tag);
            current_ = idx;
            block_ = Block::Definition;
            return;
        }
        if (at_keyword("constraint")) {
            advance();
            SourcePos at_pos = t.pos;
            const Token& id = expect(Tok::Ident, "after 'constraint'");
            std::string name = id.text;
            end_statement();
            int idx = find_concept(name);
            if (idx < 0) idx = new_concept(name, at_pos);
            ConceptDef& concept_def = result_.concepts[idx];
            TagInfo tag = take_tag(at_pos.line);
            if (tag.present && !concept_def.tag.present) concept_def.tag = std::move(tag);
            current_ = idx;
            block_ = Block::Constraint;
            return;
        }
        if (at(Tok::Ident) && peek(1).kind == Tok::Ident && peek(1).text == "as") {
            abbreviation();
            return;
        }
        chain_line();
    }

    int find_concept(const std::string& name) {
        for (std::size_t i = 0; i < result_.concepts.size(); ++i)
            if (result_.concepts[i].name == name) return static_cast<int>(i);
        return -1;
    }

    int new_concept(std::string name, SourcePos pos) {
        ConceptDef c;
        c.name = std::move(name);
        c.pos = pos;
        result_.concepts.push_back(std::move(c));
        return static_cast<int>(result_.concepts.size() - 1);
    }

    void abbreviation() {
        Abbreviation abbr;
        const Token& id = advance();  // name
        abbr.name = id.text;
        abbr.pos = id.pos;
        advance();  // 'as'
        for (const Abbreviation& existing : result_.abbreviations)
            if (existing.name == abbr.name)
                throw ParseError(id.pos, "duplicate abbreviation '" + abbr.name + "'");
        // optional "(Type)" input hint
        if (at(Tok::LParen) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::RParen) {
            advance();
            abbr.root_type = advance().text;
            advance();
        }
        // body parses like a chain: may start with another abbreviation's name
        if (at(Tok::Ident)) abbr.body.emplace_back(name_ref());
        std::vector<Segment> rest = segments("in abbreviation body");
        for (Segment& s : rest) abbr.body.push_back(std::move(s));
        if (abbr.body.empty())
            throw ParseError(id.pos, "abbreviation '" + abbr.name + "' has an empty body");
        abbr.tag = take_tag(abbr.pos.line);
        end_statement();
        result_.abbreviations.push_back(std::move(abbr));
    }

    void chain_line() {
        SourcePos at_pos = peek().pos;
        Rule rule;
        rule.pos = at_pos;
        rule.chain = chain();
        rule.tag = take_tag(at_pos.line);
        end_statement();
        if (block_ == Block::None || current_ < 0)
            throw ParseError(at_pos, "rule chain outside a definition or constraint block");
        ConceptDef& owner = result_.concepts[static_cast<std::size_t>(current_)];
        if (block_ == Block::Definition)
            owner.definition_rules.push_back(std::move(rule));
        else
            owner.constraint_rules.push_back(std::move(rule));
    }

    // --- chains and segments ----------------------------------------------
    Chain chain() {
        Chain c;
        // chain start: input anchor, name reference, or directly segments
        if (at(Tok::LParen) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::RParen) {
            advance();
            InputAnchorSegment anchor;
            anchor.type_name = advance().text;
            advance();
            c.segments.emplace_back(std::move(anchor));
        } else if (at(Tok::Ident)) {
            c.segments.emplace_back(name_ref());
        }
        std::vector<Segment> rest = segments("in rule chain");
        for (Segment& s : rest) c.segments.push_back(std::move(s));
        if (c.segments.empty())
            throw ParseError(peek().pos, "empty rule chain");
        return c;
    }

    NameRefSegment name_ref() {
        NameRefSegment ref;
        ref.name = advance().text;
        if (at(Tok::LParen) && peek(1).kind == Tok::String && peek(2).kind == Tok::RParen) {
            advance();
            ref.name_filter = advance().text;
            advance();
        }
        return ref;
    }

    // Zero or more chain segments (no leading name reference).
    std::vector<Segment> segments(const char* context) {
        std::vector<Segment> out;
        while (true) {
            if (at(Tok::Arrow)) {
                out.emplace_back(attribute_segment());
            } else if (at(Tok::LBracket) || at(Tok::Compare)) {
                out.emplace_back(metric_segment());
            } else if (at(Tok::LParen)) {
                if (peek(1).kind == Tok::String && peek(2).kind == Tok::RParen)
                    throw ParseError(peek().pos,
                                     std::string("name filter needs a preceding attribute ") +
                                         context);
                if (peek(1).kind == Tok::Ident && peek(2).kind == Tok::RParen) {
                    // "(Type)" mid-chain is a type filter, not a compound
                    advance();
                    InputAnchorSegment anchor;
                    anchor.type_name = advance().text;
                    advance();
                    out.emplace_back(std::move(anchor));
                    continue;
                }
                out.emplace_back(compound_segment());
            } else {
                break;
            }
        }
        return out;
    }

    AttributeSegment attribute_segment() {
        advance();  // '->'
        AttributeSegment seg;
        seg.attribute = expect(Tok::Ident, "after '->'").text;
        if (accept(Tok::Colon)) {
            seg.type_constraint = expect(Tok::Ident, "after ':'").text;
            seg.constraint_explicit = true;
        }
        if (at(Tok::LParen) && peek(1).kind == Tok::String && peek(2).kind == Tok::RParen) {
            advance();
            seg.name_filter = advance().text;
            advance();
        }
        return seg;
    }

    MetricSegment metric_segment() {
        MetricSegment seg;
        if (accept(Tok::LBracket)) {
            const Token& id = expect(Tok::Ident, "inside '[ ]'");
            if (iequals(id.text, "Type")) seg.metric = MetricKind::Type;
            else if (iequals(id.text, "Value")) seg.metric = MetricKind::Value;
            else if (iequals(id.text, "Size")) seg.metric = MetricKind::Size;
            else if (iequals(id.text, "Exists")) seg.metric = MetricKind::Exists;
            else if (iequals(id.text, "Unique")) seg.metric = MetricKind::Unique;
            else
                throw ParseError(id.pos, "unknown metric '" + id.text +
                                             "' (expected Type, Value, Size, Exists or Unique)");
            expect(Tok::RBracket, "after the metric name");
        } else {
            seg.metric = MetricKind::Bare;
        }
        seg.cmp = expect(Tok::Compare, "after the metric").cmp;
        seg.values.push_back(literal());
        while (accept(Tok::Pipe)) seg.values.push_back(literal());
        return seg;
    }

    Literal literal() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::String: advance(); return Literal::string(t.text);
            case Tok::Int: advance(); return Literal::integer(t.ival);
            case Tok::Real: advance(); return Literal::real(t.rval);
            case Tok::Ident:
                advance();
                if (iequals(t.text, "TRUE")) return Literal::boolean(true);
                if (iequals(t.text, "FALSE")) return Literal::boolean(false);
                return Literal::name(t.text);
            default:
                throw ParseError(t.pos, std::string("expected a literal value, got ") +
                                            token_name(t.kind));
        }
    }

    CompoundSegment compound_segment() {
        expect(Tok::LParen, "to open a compound");
        CompoundSegment seg;
        seg.expr = logic_or();
        expect(Tok::RParen, "to close the compound");
        return seg;
    }

    LogicExpr logic_or() {
        std::vector<LogicExpr> kids;
        kids.push_back(logic_xor());
        while (at(Tok::Ident) && iequals(peek().text, "OR")) {
            advance();
            kids.push_back(logic_xor());
        }
        if (kids.size() == 1) return std::move(kids.front());
        return LogicExpr::make_op(Connective::Or, std::move(kids));
    }

    LogicExpr logic_xor() {
        std::vector<LogicExpr> kids;
        kids.push_back(logic_and());
        while (at(Tok::Ident) && iequals(peek().text, "XOR")) {
            advance();
            kids.push_back(logic_and());
        }
        if (kids.size() == 1) return std::move(kids.front());
        return LogicExpr::make_op(Connective::Xor, std::move(kids));
    }

    LogicExpr logic_and() {
        std::vector<LogicExpr> kids;
        kids.push_back(logic_not());
        while (at(Tok::Ident) && iequals(peek().text, "AND")) {
            advance();
            kids.push_back(logic_not());
        }
        if (kids.size() == 1) return std::move(kids.front());
        return LogicExpr::make_op(Connective::And, std::move(kids));
    }

    LogicExpr logic_not() {
        if (at(Tok::Ident) && iequals(peek().text, "NOT")) {
            advance();
            std::vector<LogicExpr> kid;
            kid.push_back(logic_not());
            return LogicExpr::make_op(Connective::Not, std::move(kid));
        }
        return fragment_expr();
    }

    LogicExpr fragment_expr() {
        Fragment frag;
        if (at(Tok::Ident) && !is_connective_word(peek().text)) {
            frag.segments.emplace_back(name_ref());
        }
        std::vector<Segment> rest = segments("in compound fragment");
        for (Segment& s : rest) frag.segments.push_back(std::move(s));
        if (frag.segments.empty())
            throw ParseError(peek().pos, std::string("expected a chain fragment, got ") +
                                             token_name(peek().kind));
        // A bare parenthesized group parses as one compound segment; unwrap
        // it so grouping does not add a wrapper level.
        if (frag.segments.size() == 1)
            if (auto* inner = std::get_if<CompoundSegment>(&frag.segments[0].as_variant()))
                return std::move(inner->expr);
        return LogicExpr::make_leaf(std::move(frag));
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    RuleSet result_;
    std::vector<TagComment> tag_comments_;
    Block block_ = Block::None;
    int current_ = -1;
};

}  // namespace

RuleSet parse_ruleset(std::string_view source) { return Parser(lex(source)).run(); }

}  // namespace mvd::lang
