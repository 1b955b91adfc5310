#include "mvd/lang/ast.hpp"

namespace mvd::lang {

const char* to_string(Stage s) {
    switch (s) {
        case Stage::Parsed: return "parsed";
        case Stage::Desugared: return "desugared";
        case Stage::Expanded: return "expanded";
        case Stage::Completed: return "completed";
    }
    return "?";
}

const char* to_string(MetricKind m) {
    switch (m) {
        case MetricKind::Bare: return "";
        case MetricKind::Type: return "Type";
        case MetricKind::Value: return "Value";
        case MetricKind::Size: return "Size";
        case MetricKind::Exists: return "Exists";
        case MetricKind::Unique: return "Unique";
    }
    return "?";
}

const char* to_string(Cmp c) {
    switch (c) {
        case Cmp::Eq: return "=";
        case Cmp::Ne: return "!=";
        case Cmp::Gt: return ">";
        case Cmp::Lt: return "<";
        case Cmp::Ge: return ">=";
        case Cmp::Le: return "<=";
    }
    return "?";
}

const char* to_string(Connective c) {
    switch (c) {
        case Connective::And: return "AND";
        case Connective::Or: return "OR";
        case Connective::Xor: return "XOR";
        case Connective::Not: return "NOT";
    }
    return "?";
}

Literal Literal::string(std::string s) {
    Literal l;
    l.kind = Kind::String;
    l.text = std::move(s);
    return l;
}
Literal Literal::integer(std::int64_t v) {
    Literal l;
    l.kind = Kind::Int;
    l.ival = v;
    return l;
}
Literal Literal::real(double v) {
    Literal l;
    l.kind = Kind::Real;
    l.rval = v;
    return l;
}
Literal Literal::boolean(bool v) {
    Literal l;
    l.kind = Kind::Bool;
    l.bval = v;
    return l;
}
Literal Literal::name(std::string s) {
    Literal l;
    l.kind = Kind::Name;
    l.text = std::move(s);
    return l;
}

bool operator==(const Literal& a, const Literal& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Literal::Kind::String:
        case Literal::Kind::Name:
            return a.text == b.text;
        case Literal::Kind::Int: return a.ival == b.ival;
        case Literal::Kind::Real: return a.rval == b.rval;
        case Literal::Kind::Bool: return a.bval == b.bval;
    }
    return false;
}

bool operator==(const Fragment& a, const Fragment& b) { return a.segments == b.segments; }

LogicExpr LogicExpr::make_leaf(Fragment f) {
    LogicExpr e;
    e.is_leaf = true;
    e.leaf = std::move(f);
    return e;
}

LogicExpr LogicExpr::make_op(Connective op, std::vector<LogicExpr> children) {
    LogicExpr e;
    e.is_leaf = false;
    e.op = op;
    e.children = std::move(children);
    return e;
}

bool operator==(const LogicExpr& a, const LogicExpr& b) {
    if (a.is_leaf != b.is_leaf) return false;
    if (a.is_leaf) return a.leaf == b.leaf;
    return a.op == b.op && a.children == b.children;
}

const ConceptDef* RuleSet::find_concept(std::string_view name) const {
    for (const ConceptDef& c : concepts)
        if (c.name == name) return &c;
    return nullptr;
}

bool is_metric_ended(const Fragment& fragment) {
    if (fragment.segments.empty()) return false;
    const Segment& last = fragment.segments.back();
    if (std::holds_alternative<MetricSegment>(last.as_variant())) return true;
    if (const auto* comp = std::get_if<CompoundSegment>(&last.as_variant())) {
        // A trailing compound acting as a pure filter keeps the fragment
        // boolean-valued.
        struct Walk {
            static bool filter(const LogicExpr& e) {
                if (e.is_leaf) return is_metric_ended(e.leaf);
                for (const LogicExpr& kid : e.children)
                    if (!filter(kid)) return false;
                return true;
            }
        };
        return Walk::filter(comp->expr);
    }
    return false;
}

bool chain_is_global(const Chain& chain) {
    if (chain.segments.empty()) return false;
    const auto* ref = std::get_if<NameRefSegment>(&chain.segments.front().as_variant());
    return ref != nullptr && ref->is_global_type;
}

}  // namespace mvd::lang
