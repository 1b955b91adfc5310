#include "mvd/lang/format.hpp"

#include <charconv>

namespace mvd::lang {

namespace {

void quote_into(std::string& out, const std::string& text) {
    out.push_back('\'');
    for (char c : text) {
        if (c == '\'') out.push_back('\'');
        out.push_back(c);
    }
    out.push_back('\'');
}

void real_into(std::string& out, double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    std::string_view s(buf, static_cast<std::size_t>(p - buf));
    out.append(s);
    if (s.find('.') == std::string_view::npos && s.find('e') == std::string_view::npos)
        out += ".0";  // keep the literal lexing as a real
}

void literal_into(std::string& out, const Literal& lit) {
    switch (lit.kind) {
        case Literal::Kind::String: quote_into(out, lit.text); break;
        case Literal::Kind::Int: out += std::to_string(lit.ival); break;
        case Literal::Kind::Real: real_into(out, lit.rval); break;
        case Literal::Kind::Bool: out += lit.bval ? "TRUE" : "FALSE"; break;
        case Literal::Kind::Name: out += lit.text; break;
    }
}

void segment_into(std::string& out, const Segment& seg);

void fragment_into(std::string& out, const Fragment& frag) {
    for (const Segment& seg : frag.segments) segment_into(out, seg);
}

void logic_into(std::string& out, const LogicExpr& expr) {
    if (expr.is_leaf) {
        fragment_into(out, expr.leaf);
        return;
    }
    if (expr.op == Connective::Not) {
        out += "NOT ";
        const LogicExpr& kid = expr.children.front();
        if (kid.is_leaf) {
            fragment_into(out, kid.leaf);
        } else {
            out.push_back('(');
            logic_into(out, kid);
            out.push_back(')');
        }
        return;
    }
    bool first = true;
    for (const LogicExpr& kid : expr.children) {
        if (!first) {
            out.push_back(' ');
            out += to_string(expr.op);
            out.push_back(' ');
        }
        first = false;
        if (kid.is_leaf) {
            fragment_into(out, kid.leaf);
        } else if (kid.op == Connective::Not) {
            logic_into(out, kid);  // NOT binds tighter; no parens needed
        } else {
            out.push_back('(');
            logic_into(out, kid);
            out.push_back(')');
        }
    }
}

void segment_into(std::string& out, const Segment& seg) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, InputAnchorSegment>) {
                out.push_back('(');
                out += s.type_name;
                out.push_back(')');
            } else if constexpr (std::is_same_v<T, AttributeSegment>) {
                out += "->";
                out += s.attribute;
                if (!s.type_constraint.empty()) {
                    out.push_back(':');
                    out += s.type_constraint;
                }
                if (s.name_filter) {
                    out.push_back('(');
                    quote_into(out, *s.name_filter);
                    out.push_back(')');
                }
            } else if constexpr (std::is_same_v<T, MetricSegment>) {
                if (s.metric != MetricKind::Bare) {
                    out.push_back('[');
                    out += to_string(s.metric);
                    out.push_back(']');
                }
                out += to_string(s.cmp);
                bool first = true;
                for (const Literal& v : s.values) {
                    if (!first) out.push_back('|');
                    first = false;
                    literal_into(out, v);
                }
            } else if constexpr (std::is_same_v<T, CompoundSegment>) {
                out.push_back('(');
                logic_into(out, s.expr);
                out.push_back(')');
            } else if constexpr (std::is_same_v<T, NameRefSegment>) {
                out += s.name;
                if (s.name_filter) {
                    out.push_back('(');
                    quote_into(out, *s.name_filter);
                    out.push_back(')');
                }
            }
        },
        seg.as_variant());
}

}  // namespace

std::string format(const Literal& lit) {
    std::string out;
    literal_into(out, lit);
    return out;
}

std::string format(const Segment& seg) {
    std::string out;
    segment_into(out, seg);
    return out;
}

std::string format(const std::vector<Segment>& segments) {
    std::string out;
    for (const Segment& seg : segments) segment_into(out, seg);
    return out;
}

std::string format(const Chain& chain) { return format(chain.segments); }

std::string format(const LogicExpr& expr) {
    std::string out;
    logic_into(out, expr);
    return out;
}

std::string format(const RuleSet& ruleset) {
    std::string out;
    if (ruleset.schema_id) {
        out += "schema ";
        out += *ruleset.schema_id;
        out += "\n\n";
    }
    auto tag_line = [&](const TagInfo& tag) {
        if (!tag.present) return;
        out += "// ";
        out += tag.data.dump();
        out.push_back('\n');
    };
    for (const Abbreviation& abbr : ruleset.abbreviations) {
        tag_line(abbr.tag);
        out += abbr.name;
        out += " as ";
        if (abbr.root_type) {
            out.push_back('(');
            out += *abbr.root_type;
            out.push_back(')');
        }
        out += format(abbr.body);
        out.push_back('\n');
    }
    if (!ruleset.abbreviations.empty()) out.push_back('\n');
    for (const ConceptDef& c : ruleset.concepts) {
        tag_line(c.tag);
        const bool needs_definition_block = !c.definition_rules.empty() || c.extends.has_value();
        if (needs_definition_block) {
            out += "definition ";
            out += c.name;
            if (c.extends) {
                out += " extends ";
                out += *c.extends;
            }
            out.push_back('\n');
            for (const Rule& rule : c.definition_rules) {
                tag_line(rule.tag);
                out += format(rule.chain);
                out.push_back('\n');
            }
        }
        if (!c.constraint_rules.empty()) {
            out += "constraint ";
            out += c.name;
            out.push_back('\n');
            for (const Rule& rule : c.constraint_rules) {
                tag_line(rule.tag);
                out += format(rule.chain);
                out.push_back('\n');
            }
        }
        out.push_back('\n');
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    out.push_back('\n');
    return out;
}

}  // namespace mvd::lang
