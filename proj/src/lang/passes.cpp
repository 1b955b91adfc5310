#include "mvd/lang/passes.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mvd/lang/format.hpp"
#include "mvd/lang/lexer.hpp"

namespace mvd::lang {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw PassError(where + ": " + msg);
}

void require_stage(const RuleSet& rs, Stage a, Stage b, const char* pass) {
    if (rs.stage != a && rs.stage != b)
        throw PassError(std::string(pass) + " expects a " + to_string(a) + " or " + to_string(b) +
                        " ruleset, got " + to_string(rs.stage));
}

// ---------------------------------------------------------------- desugar --

void desugar_segments(std::vector<Segment>& segments);

void desugar_logic(LogicExpr& expr) {
    if (expr.is_leaf) {
        desugar_segments(expr.leaf.segments);
        return;
    }
    for (LogicExpr& kid : expr.children) desugar_logic(kid);
}

Segment make_name_filter_compound(const std::string& text) {
    AttributeSegment name_attr;
    name_attr.attribute = "Name";
    MetricSegment metric;
    metric.metric = MetricKind::Value;
    metric.cmp = Cmp::Eq;
    metric.values.push_back(Literal::string(text));
    Fragment frag;
    frag.segments.emplace_back(std::move(name_attr));
    frag.segments.emplace_back(std::move(metric));
    CompoundSegment comp;
    comp.expr = LogicExpr::make_leaf(std::move(frag));
    return Segment(std::move(comp));
}

void desugar_segments(std::vector<Segment>& segments) {
    std::vector<Segment> out;
    out.reserve(segments.size());
    for (Segment& seg : segments) {
        if (auto* attr = std::get_if<AttributeSegment>(&seg.as_variant())) {
            std::optional<std::string> filter = std::move(attr->name_filter);
            attr->name_filter.reset();
            out.push_back(std::move(seg));
            if (filter) out.push_back(make_name_filter_compound(*filter));
            continue;
        }
        if (auto* ref = std::get_if<NameRefSegment>(&seg.as_variant())) {
            std::optional<std::string> filter = std::move(ref->name_filter);
            ref->name_filter.reset();
            out.push_back(std::move(seg));
            if (filter) out.push_back(make_name_filter_compound(*filter));
            continue;
        }
        if (auto* metric = std::get_if<MetricSegment>(&seg.as_variant())) {
            if (metric->metric == MetricKind::Bare) metric->metric = MetricKind::Value;
            if (metric->values.size() > 1) {
                // v1|v2|... -> ([M]=v1 OR [M]=v2 OR ...)
                std::vector<LogicExpr> alternatives;
                for (Literal& v : metric->values) {
                    MetricSegment single;
                    single.metric = metric->metric;
                    single.cmp = metric->cmp;
                    single.values.push_back(std::move(v));
                    Fragment frag;
                    frag.segments.emplace_back(std::move(single));
                    alternatives.push_back(LogicExpr::make_leaf(std::move(frag)));
                }
                CompoundSegment comp;
                comp.expr = LogicExpr::make_op(Connective::Or, std::move(alternatives));
                out.emplace_back(std::move(comp));
            } else {
                out.push_back(std::move(seg));
            }
            continue;
        }
        if (auto* comp = std::get_if<CompoundSegment>(&seg.as_variant())) {
            desugar_logic(comp->expr);
            out.push_back(std::move(seg));
            continue;
        }
        out.push_back(std::move(seg));
    }
    segments = std::move(out);
}

// ----------------------------------------------------------------- expand --

class Expander {
public:
    explicit Expander(const std::vector<Abbreviation>& abbreviations) {
        for (const Abbreviation& a : abbreviations) by_name_[a.name] = &a;
    }

    std::vector<Segment> expand_list(const std::vector<Segment>& segments,
                                     const std::string& where) {
        std::vector<Segment> out;
        for (const Segment& seg : segments) {
            if (const auto* ref = std::get_if<NameRefSegment>(&seg.as_variant())) {
                auto it = by_name_.find(ref->name);
                if (it != by_name_.end()) {
                    const std::vector<Segment>& body = expanded_body(*it->second, where);
                    out.insert(out.end(), body.begin(), body.end());
                    continue;
                }
                NameRefSegment global = *ref;
                global.is_global_type = true;  // checked against the schema later
                out.emplace_back(std::move(global));
                continue;
            }
            if (const auto* comp = std::get_if<CompoundSegment>(&seg.as_variant())) {
                CompoundSegment expanded;
                expanded.expr = expand_logic(comp->expr, where);
                out.emplace_back(std::move(expanded));
                continue;
            }
            out.push_back(seg);
        }
        return out;
    }

private:
    LogicExpr expand_logic(const LogicExpr& expr, const std::string& where) {
        if (expr.is_leaf) {
            Fragment frag;
            frag.segments = expand_list(expr.leaf.segments, where);
            return LogicExpr::make_leaf(std::move(frag));
        }
        LogicExpr out;
        out.is_leaf = false;
        out.op = expr.op;
        for (const LogicExpr& kid : expr.children) out.children.push_back(expand_logic(kid, where));
        return out;
    }

    const std::vector<Segment>& expanded_body(const Abbreviation& abbr, const std::string& where) {
        auto done = memo_.find(abbr.name);
        if (done != memo_.end()) return done->second;
        if (!in_progress_.insert(abbr.name).second)
            fail(where, "abbreviation cycle through '" + abbr.name + "'");
        std::vector<Segment> body;
        if (abbr.root_type) {
            InputAnchorSegment anchor;
            anchor.type_name = *abbr.root_type;
            body.emplace_back(std::move(anchor));
        }
        std::vector<Segment> inner = expand_list(abbr.body, "abbreviation '" + abbr.name + "'");
        for (Segment& seg : inner) body.push_back(std::move(seg));
        in_progress_.erase(abbr.name);
        return memo_.emplace(abbr.name, std::move(body)).first->second;
    }

    std::map<std::string, const Abbreviation*> by_name_;
    std::map<std::string, std::vector<Segment>> memo_;
    std::set<std::string> in_progress_;
};

// --------------------------------------------------------------- complete --

// Static type of the current nodeset while walking a chain.
struct StaticType {
    enum class Kind { None, Entity, Select, Defined, Primitive, Mixed };
    Kind kind = Kind::None;
    std::string name;  // entity/select/defined name

    static StaticType none() { return {}; }
    static StaticType mixed() { return {Kind::Mixed, {}}; }
    bool is_none() const { return kind == Kind::None; }
};

class Completer {
public:
    Completer(RuleSet& rs, const ifc::SchemaTable& schema) : rs_(rs), schema_(schema) {}

    void run() {
        resolve_concept_roots();
        for (ConceptDef& c : rs_.concepts) {
            StaticType root = c.root_entity.empty() ? StaticType::none()
                                                    : named_type(c.root_entity);
            for (std::size_t i = 0; i < c.definition_rules.size(); ++i)
                walk_chain(c.definition_rules[i].chain, root,
                           "concept '" + c.name + "' definition rule " + std::to_string(i + 1));
            for (std::size_t i = 0; i < c.constraint_rules.size(); ++i)
                walk_chain(c.constraint_rules[i].chain, root,
                           "concept '" + c.name + "' constraint rule " + std::to_string(i + 1));
        }
    }

private:
    StaticType named_type(const std::string& name) {
        if (schema_.find_entity(name)) return {StaticType::Kind::Entity, name};
        if (const ifc::DefinedTypeDef* def = schema_.find_defined_type(name)) {
            if (def->kind == ifc::PrimitiveKind::Select) return {StaticType::Kind::Select, def->name};
            return {StaticType::Kind::Defined, def->name};
        }
        return StaticType::mixed();
    }

    // Concepts resolve parents before children; 'extends' may name another
    // concept or an entity type.
    void resolve_concept_roots() {
        std::map<std::string, ConceptDef*> by_name;
        for (ConceptDef& c : rs_.concepts) {
            if (by_name.count(c.name)) fail("concept '" + c.name + "'", "duplicate concept name");
            by_name[c.name] = &c;
        }
        std::set<std::string> visiting, done;
        auto resolve = [&](auto&& self, ConceptDef& c) -> void {
            if (done.count(c.name)) return;
            if (!visiting.insert(c.name).second)
                fail("concept '" + c.name + "'", "concept inheritance cycle");
            if (c.extends) {
                auto parent = by_name.find(*c.extends);
                if (parent != by_name.end()) {
                    c.extends_concept = true;
                    self(self, *parent->second);
                    c.root_entity = parent->second->root_entity;
                } else if (schema_.find_entity(*c.extends)) {
                    c.extends_concept = false;
                    c.root_entity = schema_.entity(*c.extends).name;
                } else {
                    fail("concept '" + c.name + "'",
                         "extends unknown concept or entity '" + *c.extends + "'");
                }
            }
            // A leading anchor in the first definition rule narrows (or, for
            // parentless concepts, establishes) the root type.
            if (!c.definition_rules.empty()) {
                const Chain& first = c.definition_rules.front().chain;
                if (!first.segments.empty()) {
                    if (const auto* anchor =
                            std::get_if<InputAnchorSegment>(&first.segments[0].as_variant())) {
                        const ifc::EntityDef* ent = schema_.find_entity(anchor->type_name);
                        if (!ent)
                            fail("concept '" + c.name + "'",
                                 "anchor names unknown entity '" + anchor->type_name + "'");
                        if (c.root_entity.empty() || schema_.is_subtype(ent->name, c.root_entity))
                            c.root_entity = ent->name;
                    }
                }
            }
            if (c.root_entity.empty() && !c.definition_rules.empty())
                fail("concept '" + c.name + "'",
                     "definition must start with a (Type) anchor or extend a parent");
            visiting.erase(c.name);
            done.insert(c.name);
        };
        for (ConceptDef& c : rs_.concepts) resolve(resolve, c);
    }

    void walk_chain(Chain& chain, StaticType input, const std::string& where) {
        if (chain.segments.empty()) fail(where, "empty chain");
        if (const auto* ref = std::get_if<NameRefSegment>(&chain.segments[0].as_variant())) {
            // Global form: must anchor an entity type, and the remainder has
            // to be a collection metric (optionally after more segments).
            if (!schema_.find_entity(ref->name))
                fail(where, "'" + ref->name + "' is neither an abbreviation nor an entity type");
            if (chain.segments.size() < 2)
                fail(where, "global chain needs a collection metric after '" + ref->name + "'");
            const auto* metric = std::get_if<MetricSegment>(&chain.segments[1].as_variant());
            if (!metric || (metric->metric != MetricKind::Size &&
                            metric->metric != MetricKind::Exists &&
                            metric->metric != MetricKind::Unique))
                fail(where, "global chain on '" + ref->name +
                                "' must use a collection metric ([Size], [Exists] or [Unique])");
            if (chain.segments.size() > 2)
                fail(where, "global chain must end after its collection metric");
            check_metric(*std::get_if<MetricSegment>(&chain.segments[1].as_variant()), true, where);
            return;
        }
        if (input.is_none())
            fail(where, "concept has no applicable set; the chain must anchor an entity type");
        walk_segments(chain.segments, input, 0, where);
    }

    // Walks segments starting at `from`; returns the exit static type.
    StaticType walk_segments(std::vector<Segment>& segments, StaticType state, std::size_t from,
                             const std::string& where) {
        StaticType before_attr = state;  // parent nodeset type for collection metrics
        // Collection metrics count the last attribute's targets per parent
        // node; scalar metrics and filter compounds in between only narrow
        // that set, so they keep the count well-defined.
        bool collection_ok = false;
        for (std::size_t i = from; i < segments.size(); ++i) {
            Segment& seg = segments[i];
            if (auto* anchor = std::get_if<InputAnchorSegment>(&seg.as_variant())) {
                state = apply_anchor(*anchor, state, where);
                collection_ok = false;
                continue;
            }
            if (auto* attr = std::get_if<AttributeSegment>(&seg.as_variant())) {
                before_attr = state;
                state = apply_attribute(*attr, state, where);
                collection_ok = true;
                continue;
            }
            if (auto* metric = std::get_if<MetricSegment>(&seg.as_variant())) {
                const bool collection = metric->metric == MetricKind::Size ||
                                        metric->metric == MetricKind::Exists ||
                                        metric->metric == MetricKind::Unique;
                if (collection) {
                    if (!collection_ok)
                        fail(where, "collection metric [" +
                                        std::string(to_string(metric->metric)) +
                                        "] must follow an attribute");
                    state = before_attr;  // steps back to the parent nodeset
                    collection_ok = false;
                }
                check_metric(*metric, collection, where);
                continue;
            }
            if (auto* comp = std::get_if<CompoundSegment>(&seg.as_variant())) {
                StaticType next = apply_compound(*comp, state, where);
                if (!(next.kind == state.kind && next.name == state.name)) collection_ok = false;
                state = next;
                continue;
            }
            if (std::get_if<NameRefSegment>(&seg.as_variant()))
                fail(where, "abbreviation references must appear at the start of a chain");
        }
        return state;
    }

    StaticType apply_anchor(const InputAnchorSegment& anchor, StaticType state,
                            const std::string& where) {
        const ifc::EntityDef* ent = schema_.find_entity(anchor.type_name);
        if (!ent) fail(where, "anchor names unknown entity '" + anchor.type_name + "'");
        if (state.kind == StaticType::Kind::Entity) {
            if (!schema_.is_subtype(ent->name, state.name) &&
                !schema_.is_subtype(state.name, ent->name))
                fail(where, "anchor (" + anchor.type_name + ") can never match " + state.name);
            if (schema_.is_subtype(ent->name, state.name)) return {StaticType::Kind::Entity, ent->name};
            return state;  // anchor is broader; keep the narrower type
        }
        return {StaticType::Kind::Entity, ent->name};
    }

    StaticType apply_attribute(AttributeSegment& attr, StaticType state, const std::string& where) {
        if (state.kind == StaticType::Kind::Mixed)
            fail(where, "cannot resolve '->" + attr.attribute +
                            "'; preceding compound yields mixed types, add a type constraint");
        if (state.kind == StaticType::Kind::Defined || state.kind == StaticType::Kind::Primitive)
            fail(where, "'->" + attr.attribute + "' applied to value-typed nodes (" +
                            (state.name.empty() ? "primitive" : state.name) + ")");
        auto resolved = schema_.resolve_attribute(state.name, attr.attribute);
        if (!resolved) {
            std::string msg = "unknown attribute '" + attr.attribute + "' on " + state.name;
            std::vector<std::string> names = schema_.attribute_names(state.name);
            if (!names.empty()) {
                msg += "; declared attributes:";
                std::size_t shown = 0;
                for (const std::string& n : names) {
                    if (shown++ == 12) {
                        msg += " ...";
                        break;
                    }
                    msg += " " + n;
                }
            }
            fail(where, msg);
        }
        if (attr.type_constraint.empty()) {
            attr.type_constraint = resolved->declared_type;
            attr.constraint_explicit = false;
            return named_type(resolved->declared_type);
        }
        if (!schema_.has_type_name(attr.type_constraint))
            fail(where, "type constraint ':" + attr.type_constraint + "' names an unknown type");
        const std::string declared = resolved->declared_type;
        const bool narrower = schema_.matches_constraint(attr.type_constraint, declared);
        const bool broader = schema_.matches_constraint(declared, attr.type_constraint);
        if (!narrower && !broader)
            fail(where, "constraint ':" + attr.type_constraint + "' is unrelated to declared type " +
                            declared + " of '" + attr.attribute + "'");
        return named_type(narrower ? attr.type_constraint : declared);
    }

    void check_metric(const MetricSegment& metric, bool collection, const std::string& where) {
        const Literal& v = metric.values.front();
        switch (metric.metric) {
            case MetricKind::Bare:
                fail(where, "internal: bare metric survived desugaring");
            case MetricKind::Value:
                break;
            case MetricKind::Type:
                if (metric.cmp != Cmp::Eq && metric.cmp != Cmp::Ne)
                    fail(where, "[Type] supports only = and !=");
                if (v.kind != Literal::Kind::String && v.kind != Literal::Kind::Name)
                    fail(where, "[Type] compares against a type name");
                break;
            case MetricKind::Size:
                if (v.kind != Literal::Kind::Int)
                    fail(where, "[Size] compares against an integer");
                break;
            case MetricKind::Exists:
            case MetricKind::Unique:
                if (metric.cmp != Cmp::Eq && metric.cmp != Cmp::Ne)
                    fail(where, std::string("[") + to_string(metric.metric) +
                                    "] supports only = and !=");
                if (v.kind != Literal::Kind::Bool)
                    fail(where, std::string("[") + to_string(metric.metric) +
                                    "] compares against TRUE or FALSE");
                break;
        }
        (void)collection;
    }

    StaticType apply_compound(CompoundSegment& comp, StaticType state, const std::string& where) {
        std::vector<StaticType> exits;
        bool all_filters = true;
        walk_logic(comp.expr, state, where, exits, all_filters);
        if (all_filters) return state;
        // Mapping compound: join the fragment exit types.
        StaticType join = StaticType::mixed();
        bool first = true;
        for (const StaticType& t : exits) {
            if (first) {
                join = t;
                first = false;
                continue;
            }
            join = join_types(join, t);
        }
        return join;
    }

    void walk_logic(LogicExpr& expr, StaticType state, const std::string& where,
                    std::vector<StaticType>& exits, bool& all_filters) {
        if (expr.is_leaf) {
            if (expr.leaf.segments.empty()) fail(where, "empty compound fragment");
            if (const auto* ref =
                    std::get_if<NameRefSegment>(&expr.leaf.segments[0].as_variant())) {
                // Global fragment inside a compound: constant truth value.
                if (!schema_.find_entity(ref->name))
                    fail(where,
                         "'" + ref->name + "' is neither an abbreviation nor an entity type");
                if (expr.leaf.segments.size() != 2 ||
                    !std::holds_alternative<MetricSegment>(expr.leaf.segments[1].as_variant()))
                    fail(where, "global fragment on '" + ref->name +
                                    "' must be exactly a collection metric");
                auto& metric = std::get<MetricSegment>(expr.leaf.segments[1].as_variant());
                if (metric.metric != MetricKind::Size && metric.metric != MetricKind::Exists &&
                    metric.metric != MetricKind::Unique)
                    fail(where, "global fragment on '" + ref->name +
                                    "' must use a collection metric");
                check_metric(metric, true, where);
                return;  // boolean fragment; no exit type
            }
            StaticType exit = walk_segments(expr.leaf.segments, state, 0, where);
            if (!is_metric_ended(expr.leaf)) {
                exits.push_back(exit);
                all_filters = false;
            }
            return;
        }
        if (expr.op == Connective::Not) {
            bool kid_filters = true;
            std::vector<StaticType> kid_exits;
            walk_logic(expr.children.front(), state, where, kid_exits, kid_filters);
            if (!kid_filters)
                fail(where, "NOT applies to boolean fragments; this fragment maps to new nodes");
            return;
        }
        for (LogicExpr& kid : expr.children) walk_logic(kid, state, where, exits, all_filters);
    }

    StaticType join_types(const StaticType& a, const StaticType& b) {
        if (a.kind != b.kind) return StaticType::mixed();
        if (a.name == b.name) return a;
        if (a.kind == StaticType::Kind::Entity) {
            // lowest common ancestor in the entity hierarchy
            const ifc::EntityDef* ent = schema_.find_entity(a.name);
            while (ent) {
                if (schema_.is_subtype(b.name, ent->name))
                    return {StaticType::Kind::Entity, ent->name};
                ent = ent->supertype ? schema_.find_entity(*ent->supertype) : nullptr;
            }
        }
        return StaticType::mixed();
    }

    RuleSet& rs_;
    const ifc::SchemaTable& schema_;
};

}  // namespace

RuleSet desugar(RuleSet in) {
    require_stage(in, Stage::Parsed, Stage::Desugared, "desugar");
    for (Abbreviation& abbr : in.abbreviations) desugar_segments(abbr.body);
    for (ConceptDef& c : in.concepts) {
        for (Rule& r : c.definition_rules) desugar_segments(r.chain.segments);
        for (Rule& r : c.constraint_rules) desugar_segments(r.chain.segments);
    }
    in.stage = Stage::Desugared;
    return in;
}

RuleSet expand_abbreviations(RuleSet in) {
    require_stage(in, Stage::Desugared, Stage::Expanded, "expand_abbreviations");
    Expander expander(in.abbreviations);
    for (ConceptDef& c : in.concepts) {
        for (Rule& r : c.definition_rules)
            r.chain.segments = expander.expand_list(r.chain.segments, "concept '" + c.name + "'");
        for (Rule& r : c.constraint_rules)
            r.chain.segments = expander.expand_list(r.chain.segments, "concept '" + c.name + "'");
    }
    in.stage = Stage::Expanded;
    return in;
}

RuleSet complete_types(RuleSet in, const ifc::SchemaTable& schema) {
    require_stage(in, Stage::Expanded, Stage::Completed, "complete_types");
    if (in.schema_id && !iequals(*in.schema_id, schema.schema_id()))
        throw PassError("ruleset targets schema " + *in.schema_id + " but was compiled against " +
                        schema.schema_id());
    Completer(in, schema).run();
    in.stage = Stage::Completed;
    return in;
}

RuleSet compile(RuleSet in, const ifc::SchemaTable& schema) {
    return complete_types(expand_abbreviations(desugar(std::move(in))), schema);
}

}  // namespace mvd::lang
