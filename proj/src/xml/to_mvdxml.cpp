#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "mvd/lang/format.hpp"
#include "mvd/xml/convert.hpp"

namespace mvd::xml {

namespace {

using lang::Connective;
using lang::MetricKind;

// One template hop: an attribute plus the entity constraint below it.
struct Step {
    std::string attribute;
    std::string entity;
    friend bool operator==(const Step&, const Step&) = default;
};
using Path = std::vector<Step>;

std::string canon(const Path& path) {
    std::string out;
    for (const Step& s : path) {
        out += s.attribute;
        out.push_back(':');
        out += s.entity;
        out.push_back('/');
    }
    return out;
}

// Statement tree whose leaves still carry template paths instead of
// RuleIDs; ids exist only after the whole template is built.
struct Proto {
    bool is_leaf = true;
    Path path;
    bool has_constraint = false;
    MetricKind metric = MetricKind::Value;
    lang::Cmp cmp = lang::Cmp::Eq;
    lang::Literal value;
    Connective op = Connective::And;
    std::vector<Proto> kids;
    // Where the source compound evaluated, for groups that came from one.
    // The importer rederives branch points from leaf paths, so exporting is
    // only faithful when that derivation lands exactly here.
    bool positional = false;
    Path at;

    static Proto bare(Path p) {
        Proto out;
        out.path = std::move(p);
        return out;
    }
    static Proto leaf(Path p, MetricKind m, lang::Cmp cmp, lang::Literal v) {
        Proto out = bare(std::move(p));
        out.has_constraint = true;
        out.metric = m;
        out.cmp = cmp;
        out.value = std::move(v);
        return out;
    }
    static Proto group(Connective op, std::vector<Proto> kids) {
        Proto out;
        out.is_leaf = false;
        out.op = op;
        out.kids = std::move(kids);
        return out;
    }
};

// Raised while walking a chain the statement grammar cannot express; the
// caller downgrades it to a marker comment (or an error in strict mode).
struct Inexpressible {
    std::string reason;
};

bool is_collection(MetricKind m) {
    return m == MetricKind::Size || m == MetricKind::Exists || m == MetricKind::Unique;
}

bool contains_not(const Proto& p) {
    if (p.is_leaf) return false;
    if (p.op == Connective::Not) return true;
    for (const Proto& kid : p.kids)
        if (contains_not(kid)) return true;
    return false;
}

void gather_leaves(const Proto& p, std::vector<const Proto*>& out) {
    if (p.is_leaf) {
        out.push_back(&p);
        return;
    }
    for (const Proto& kid : p.kids) gather_leaves(kid, out);
}

// whole node sets (bare existence, counts) force the branch point one hop up
bool leaf_holds_collection(const Proto& l) {
    return !l.has_constraint || is_collection(l.metric);
}

// Mirror of how the importer picks a group's branch point: the longest
// shared prefix of the leaf paths, lifted off any collection-valued leaf,
// pinned to the enclosing point as soon as the group negates anything.
Path import_placement(const Proto& g, const Path& base) {
    if (g.is_leaf) return base;
    if (contains_not(g)) return base;
    std::vector<const Proto*> leaves;
    gather_leaves(g, leaves);
    if (leaves.empty()) return base;
    Path shared = leaves.front()->path;
    for (const Proto* l : leaves) {
        std::size_t n = 0;
        while (n < shared.size() && n < l->path.size() && shared[n] == l->path[n]) ++n;
        shared.resize(n);
    }
    if (shared.size() < base.size()) return base;
    auto must_lift = [&] {
        if (shared.size() <= base.size()) return false;
        for (const Proto* l : leaves)
            if (l->path == shared && leaf_holds_collection(*l)) return true;
        return false;
    };
    while (must_lift()) shared.pop_back();
    return shared;
}

bool fragment_is_global(const lang::Fragment& frag) {
    return !frag.segments.empty() &&
           std::holds_alternative<lang::NameRefSegment>(frag.segments.front().as_variant());
}

bool has_global_fragment(const lang::LogicExpr& e) {
    if (e.is_leaf) return fragment_is_global(e.leaf);
    for (const auto& kid : e.children)
        if (has_global_fragment(kid)) return true;
    return false;
}

bool logic_all_filters(const lang::LogicExpr& e) {
    if (e.is_leaf) return fragment_is_global(e.leaf) || lang::is_metric_ended(e.leaf);
    for (const auto& kid : e.children)
        if (!logic_all_filters(kid)) return false;
    return true;
}

// Flattens an OR tree of mapping branches; non-OR subgroups pass only when
// they are pure filters (they keep the front instead of mapping it).
void or_branches(const lang::LogicExpr& e, std::vector<const lang::LogicExpr*>& out) {
    if (e.is_leaf) {
        out.push_back(&e);
        return;
    }
    if (e.op == Connective::Or) {
        for (const auto& kid : e.children) or_branches(kid, out);
        return;
    }
    if (logic_all_filters(e)) {
        out.push_back(&e);
        return;
    }
    throw Inexpressible{std::string(lang::to_string(e.op)) +
                        " over mapping fragments has no statement form"};
}

class RuleConverter {
  public:
    RuleConverter(const ifc::SchemaTable& schema, std::string root_entity)
        : schema_(schema), root_entity_(std::move(root_entity)) {}

    Proto convert(const lang::Chain& chain) {
        if (lang::chain_is_global(chain))
            throw Inexpressible{"root-level metric cannot be assigned a RuleID"};
        Proto p = walk(chain.segments, 0, {}, 0, false);
        verify(p, {});
        return p;
    }

  private:
    Proto walk(const std::vector<lang::Segment>& segs, std::size_t i, Path path,
               std::size_t base_len, bool in_fragment) {
        std::vector<Proto> collected;
        while (i < segs.size()) {
            const auto& var = segs[i].as_variant();
            if (const auto* anchor = std::get_if<lang::InputAnchorSegment>(&var)) {
                apply_anchor(*anchor, path, base_len, in_fragment);
                ++i;
                continue;
            }
            if (const auto* attr = std::get_if<lang::AttributeSegment>(&var)) {
                if (attr->type_constraint.empty())
                    throw Inexpressible{"attribute '" + attr->attribute +
                                        "' has no resolved type"};
                path.push_back({attr->attribute, attr->type_constraint});
                ++i;
                continue;
            }
            if (const auto* metric = std::get_if<lang::MetricSegment>(&var)) {
                collected.push_back(metric_leaf(*metric, path, base_len));
                if (is_collection(metric->metric)) path.pop_back();
                ++i;
                continue;
            }
            if (const auto* comp = std::get_if<lang::CompoundSegment>(&var)) {
                if (has_global_fragment(comp->expr))
                    throw Inexpressible{"global fragment inside a compound"};
                if (logic_all_filters(comp->expr)) {
                    collected.push_back(logic(comp->expr, path));
                    ++i;
                    continue;
                }
                collected.push_back(distribute(comp->expr, segs, i, path));
                i = segs.size();
                break;
            }
            throw Inexpressible{"abbreviation reference survived resolution"};
        }
        if (collected.empty()) {
            if (path.size() == base_len)
                throw Inexpressible{"rule states nothing beyond its root set"};
            collected.push_back(Proto::bare(path));
        }
        if (collected.size() == 1) return std::move(collected.front());
        return Proto::group(Connective::And, std::move(collected));
    }

    void apply_anchor(const lang::InputAnchorSegment& anchor, Path& path, std::size_t base_len,
                      bool in_fragment) {
        if (path.size() == base_len) {
            if (in_fragment || base_len != 0)
                throw Inexpressible{"type anchor at a branch point"};
            if (!schema_.is_subtype(root_entity_, anchor.type_name))
                throw Inexpressible{"lead anchor (" + anchor.type_name +
                                    ") narrows the root set"};
            return;
        }
        std::string& entity = path.back().entity;
        if (entity.empty() || schema_.is_subtype(anchor.type_name, entity)) {
            entity = anchor.type_name;
            return;
        }
        if (!schema_.is_subtype(entity, anchor.type_name))
            throw Inexpressible{"anchor (" + anchor.type_name +
                                ") conflicts with the ':" + entity + "' constraint"};
        // anchor is broader than the existing constraint: nothing to add
    }

    Proto metric_leaf(const lang::MetricSegment& metric, const Path& path,
                      std::size_t base_len) {
        if (metric.metric == MetricKind::Bare || metric.values.size() != 1)
            throw Inexpressible{"metric not resolved; run the language pipeline first"};
        if (path.size() == base_len) {
            if (is_collection(metric.metric))
                throw Inexpressible{"collection metric at a branch point"};
            if (base_len == 0) throw Inexpressible{"metric on the root nodeset"};
        }
        return Proto::leaf(path, metric.metric, metric.cmp, metric.values.front());
    }

    // Filter compound: every fragment keeps the front, so the statement is
    // a straight logical group over the fragments' own leaves.
    Proto logic(const lang::LogicExpr& e, const Path& base) {
        if (e.is_leaf) return walk(e.leaf.segments, 0, base, base.size(), true);
        std::vector<Proto> kids;
        kids.reserve(e.children.size());
        for (const auto& kid : e.children) kids.push_back(logic(kid, base));
        Proto g = Proto::group(e.op, std::move(kids));
        g.positional = true;
        g.at = base;
        return g;
    }

    // Statement groups carry no explicit position, so a reader rederives one
    // from the leaf paths.  Reject any group whose rederived point differs
    // from where the compound actually sat; everything else re-imports with
    // the original meaning (AND chains along one spine and OR groups are
    // insensitive to the exact depth, which is why only positional groups
    // need the equality).
    void verify(const Proto& p, const Path& base) {
        if (p.is_leaf) return;
        Path at = import_placement(p, base);
        bool depth_sensitive = p.op != Connective::Or || contains_not(p);
        if (p.positional && depth_sensitive && at != p.at)
            throw Inexpressible{"branch point is not the meet of its leaf paths"};
        for (const Proto& kid : p.kids) verify(kid, at);
    }

    // OR mapping compound: existential semantics distribute, so the chain
    // tail after the compound is replayed once per branch.
    Proto distribute(const lang::LogicExpr& expr, const std::vector<lang::Segment>& segs,
                     std::size_t i, const Path& path) {
        std::vector<const lang::LogicExpr*> branches;
        or_branches(expr, branches);
        std::vector<Proto> alts;
        alts.reserve(branches.size());
        for (const lang::LogicExpr* br : branches) {
            std::vector<lang::Segment> splice;
            if (br->is_leaf && !lang::is_metric_ended(br->leaf) &&
                !fragment_is_global(br->leaf)) {
                splice = br->leaf.segments;
            } else {
                // filter branch: keeps the entry node, so wrap it and let
                // the continuation start from the same node
                lang::CompoundSegment wrap;
                wrap.expr = *br;
                splice.emplace_back(std::move(wrap));
            }
            splice.insert(splice.end(), segs.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                          segs.end());
            alts.push_back(walk(splice, 0, path, path.size(), true));
        }
        if (alts.size() == 1) return std::move(alts.front());
        return Proto::group(Connective::Or, std::move(alts));
    }

    const ifc::SchemaTable& schema_;
    std::string root_entity_;
};

// Unions the leaf paths of every statement into one attribute tree and
// assigns RuleIDs.  The RuleID sits on the AttributeRule when the attribute
// has a single entity alternative, and on each referenced EntityRule when
// alternatives would make that ambiguous.
class TemplateBuilder {
  public:
    void add(const Proto& p) {
        if (p.is_leaf) {
            insert(p.path);
            return;
        }
        for (const Proto& kid : p.kids) add(kid);
    }

    std::vector<TemplateAttribute> build() {
        assign_level(kids_of_root_, {});
        return materialize(kids_of_root_);
    }

    const std::string& rule_id(const Path& path) const { return ids_.at(canon(path)); }

  private:
    struct Node {
        Step step;
        bool referenced = false;
        std::vector<std::size_t> kids;
    };

    void insert(const Path& path) {
        std::size_t node = npos;
        for (const Step& step : path) {
            std::vector<std::size_t>& level = node == npos ? kids_of_root_ : nodes_[node].kids;
            std::size_t found = npos;
            for (std::size_t idx : level)
                if (nodes_[idx].step == step) {
                    found = idx;
                    break;
                }
            if (found == npos) {
                found = nodes_.size();
                nodes_.push_back({step, false, {}});
                // re-resolve: nodes_ may have reallocated
                (node == npos ? kids_of_root_ : nodes_[node].kids).push_back(found);
            }
            node = found;
        }
        nodes_[node].referenced = true;
    }

    std::string unique_id(const std::string& base) {
        if (used_.insert(base).second) return base;
        for (int n = 2;; ++n) {
            std::string candidate = base + "_" + std::to_string(n);
            if (used_.insert(candidate).second) return candidate;
        }
    }

    void assign_level(const std::vector<std::size_t>& level, const Path& prefix) {
        // count entity alternatives per attribute name at this level
        std::map<std::string, int> alternatives;
        for (std::size_t idx : level) ++alternatives[nodes_[idx].step.attribute];
        for (std::size_t idx : level) {
            const Node& node = nodes_[idx];
            Path path = prefix;
            path.push_back(node.step);
            if (node.referenced) {
                std::string id = unique_id(node.step.attribute);
                ids_[canon(path)] = id;
                if (alternatives[node.step.attribute] == 1)
                    attr_ids_[canon_attr(prefix, node.step.attribute)] = id;
                else
                    entity_ids_[canon(path)] = id;
            }
            assign_level(node.kids, path);
        }
    }

    std::vector<TemplateAttribute> materialize(const std::vector<std::size_t>& level) {
        std::vector<TemplateAttribute> out;
        std::set<std::string> emitted;
        for (std::size_t i = 0; i < level.size(); ++i) {
            const std::string& attr = nodes_[level[i]].step.attribute;
            if (!emitted.insert(attr).second) continue;
            TemplateAttribute rule;
            rule.attribute = attr;
            for (std::size_t idx : level) {
                const Node& node = nodes_[idx];
                if (node.step.attribute != attr) continue;
                TemplateEntity ent;
                ent.entity = node.step.entity;
                Path path = path_of(idx);
                if (auto it = entity_ids_.find(canon(path)); it != entity_ids_.end())
                    ent.rule_id = it->second;
                ent.attributes = materialize(node.kids);
                rule.entities.push_back(std::move(ent));
            }
            Path prefix = path_of(level[i]);
            prefix.pop_back();
            if (auto it = attr_ids_.find(canon_attr(prefix, attr)); it != attr_ids_.end())
                rule.rule_id = it->second;
            out.push_back(std::move(rule));
        }
        return out;
    }

    // Reconstructs a node's path by scanning parents; template trees are
    // small, so the quadratic walk does not matter.
    Path path_of(std::size_t target) const {
        Path path;
        find_path(kids_of_root_, target, path);
        return path;
    }

    bool find_path(const std::vector<std::size_t>& level, std::size_t target, Path& path) const {
        for (std::size_t idx : level) {
            path.push_back(nodes_[idx].step);
            if (idx == target || find_path(nodes_[idx].kids, target, path)) return true;
            path.pop_back();
        }
        return false;
    }

    static std::string canon_attr(const Path& prefix, const std::string& attr) {
        return canon(prefix) + attr + "@";
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<Node> nodes_;
    std::vector<std::size_t> kids_of_root_;
    std::map<std::string, std::string> ids_;
    std::map<std::string, std::string> attr_ids_;
    std::map<std::string, std::string> entity_ids_;
    std::set<std::string> used_;
};

Statement materialize_statement(const Proto& p, const TemplateBuilder& tb) {
    if (p.is_leaf) {
        // plain existence canonicalizes to a bare reference, so a chain that
        // just navigates and its [Exists]=TRUE spelling export identically
        bool plain_exists = p.has_constraint && p.metric == MetricKind::Exists &&
                            p.cmp == lang::Cmp::Eq &&
                            p.value.kind == lang::Literal::Kind::Bool && p.value.bval;
        if (!p.has_constraint || plain_exists) return Statement::leaf(tb.rule_id(p.path));
        return Statement::leaf(tb.rule_id(p.path), p.metric, p.cmp, p.value);
    }
    std::vector<Statement> kids;
    kids.reserve(p.kids.size());
    for (const Proto& kid : p.kids) kids.push_back(materialize_statement(kid, tb));
    return Statement::group(p.op, kids);
}

std::string rule_marker_payload(const lang::Rule& rule) {
    lang::RuleSet sub;
    lang::ConceptDef holder;
    holder.name = "M";
    holder.constraint_rules.push_back(rule);
    sub.concepts.push_back(std::move(holder));
    return lang::format(sub);
}

std::string concept_marker_payload(const lang::ConceptDef& c) {
    lang::RuleSet sub;
    sub.concepts.push_back(c);
    return lang::format(sub);
}

// A definition rule that is nothing but a lead anchor already satisfied by
// the root entity adds no information; the applicableRootEntity carries it.
bool is_trivial_anchor_rule(const lang::Chain& chain, const std::string& root_entity,
                            const ifc::SchemaTable& schema) {
    if (chain.segments.size() != 1) return false;
    const auto* anchor = std::get_if<lang::InputAnchorSegment>(&chain.segments[0].as_variant());
    return anchor && schema.is_subtype(root_entity, anchor->type_name);
}

struct EntryDraft {
    const lang::Rule* rule = nullptr;
    std::optional<Proto> proto;  // unset = marker
};

// Keys with dedicated XML attributes; anything else forces the full tag
// JSON into the description attribute.
bool tag_needs_description(const lang::TagInfo& tag) {
    if (!tag.present) return false;
    for (auto it = tag.data.begin(); it != tag.data.end(); ++it)
        if (it.key() != "uuid" && it.key() != "code" && it.key() != "er" &&
            it.key() != "severity")
            return true;
    return false;
}

}  // namespace

MvdXmlDoc to_mvdxml(const lang::RuleSet& rs, const ifc::SchemaTable& schema,
                    const ConvertOptions& options) {
    if (rs.stage != lang::Stage::Completed)
        throw ConvertError("to_mvdxml needs a fully resolved ruleset");

    MvdXmlDoc doc;
    doc.name = options.view_name;
    doc.uuid = derived_uuid("mvdxml|" + options.view_name);

    ModelView view;
    view.name = options.view_name;
    view.uuid = derived_uuid("view|" + options.view_name);
    view.applicable_schema = rs.schema_id.value_or("");

    std::vector<std::string> er_names{"General"};
    for (const lang::ConceptDef& c : rs.concepts) {
        std::string er = c.tag.get_string("er");
        if (!er.empty() && std::find(er_names.begin(), er_names.end(), er) == er_names.end())
            er_names.push_back(er);
    }
    for (const std::string& name : er_names) {
        ExchangeRequirement req;
        req.uuid = derived_uuid("er|" + name);
        req.name = name;
        view.requirements.push_back(std::move(req));
    }

    for (const lang::ConceptDef& c : rs.concepts) {
        if (c.root_entity.empty()) {
            // all-global concept: no root entity to hang a ConceptRoot on
            if (options.strict)
                throw ConvertError("concept '" + c.name +
                                   "' has only model-wide rules, which mvdXML cannot express");
            view.global_markers.push_back(concept_marker_payload(c));
            continue;
        }

        // flatten the extends lineage, outermost ancestor first
        std::vector<const lang::ConceptDef*> lineage;
        for (const lang::ConceptDef* cur = &c; cur;) {
            lineage.push_back(cur);
            cur = cur->extends_concept && cur->extends ? rs.find_concept(*cur->extends)
                                                       : nullptr;
        }
        std::vector<const lang::Rule*> defs, cons;
        for (auto it = lineage.rbegin(); it != lineage.rend(); ++it) {
            for (const lang::Rule& r : (*it)->definition_rules) defs.push_back(&r);
            for (const lang::Rule& r : (*it)->constraint_rules) cons.push_back(&r);
        }

        RuleConverter rc(schema, c.root_entity);
        auto draft = [&](const std::vector<const lang::Rule*>& rules, const char* kind) {
            std::vector<EntryDraft> out;
            for (std::size_t i = 0; i < rules.size(); ++i) {
                if (is_trivial_anchor_rule(rules[i]->chain, c.root_entity, schema)) continue;
                EntryDraft d;
                d.rule = rules[i];
                try {
                    d.proto = rc.convert(rules[i]->chain);
                } catch (const Inexpressible& e) {
                    if (options.strict)
                        throw ConvertError("concept '" + c.name + "' " + kind + " rule " +
                                           std::to_string(i + 1) + ": " + e.reason);
                }
                out.push_back(std::move(d));
            }
            return out;
        };
        std::vector<EntryDraft> def_drafts = draft(defs, "definition");
        std::vector<EntryDraft> con_drafts = draft(cons, "constraint");

        TemplateBuilder tb;
        for (const EntryDraft& d : def_drafts)
            if (d.proto) tb.add(*d.proto);
        for (const EntryDraft& d : con_drafts)
            if (d.proto) tb.add(*d.proto);

        ConceptTemplate tpl;
        tpl.uuid = derived_uuid("template|" + c.name);
        tpl.name = c.name;
        tpl.applicable_schema = view.applicable_schema;
        tpl.applicable_entity = c.root_entity;
        tpl.rules = tb.build();

        auto materialize = [&](const std::vector<EntryDraft>& drafts) {
            TemplateRuleBlock block;
            for (const EntryDraft& d : drafts) {
                RuleEntry entry;
                if (d.proto) {
                    entry.statement = materialize_statement(*d.proto, tb);
                    if (d.rule->tag.present) entry.description = d.rule->tag.data.dump();
                } else {
                    entry.is_marker = true;
                    entry.marker = rule_marker_payload(*d.rule);
                }
                block.entries.push_back(std::move(entry));
            }
            return block;
        };

        ConceptRoot root;
        root.uuid = derived_uuid("root|" + c.name);
        root.name = c.name;
        root.applicable_root_entity = c.root_entity;
        if (!def_drafts.empty()) {
            root.has_applicability = true;
            root.applicability_template_ref = tpl.uuid;
            root.applicability = materialize(def_drafts);
        }

        std::string tag_uuid = c.tag.get_string("uuid");
        std::string tag_code = c.tag.get_string("code");
        std::string tag_er = c.tag.get_string("er");
        std::string tag_severity = c.tag.get_string("severity");
        std::string description = tag_needs_description(c.tag) ? c.tag.data.dump() : "";

        if (con_drafts.empty()) {
            // applicability-only concept: tag details ride on the root
            if (!tag_uuid.empty()) root.uuid = tag_uuid;
            root.code = tag_code;
            root.description = description;
        } else {
            MvdConcept mc;
            mc.uuid = tag_uuid.empty() ? derived_uuid("concept|" + c.name) : tag_uuid;
            mc.name = c.name;
            mc.code = tag_code;
            mc.description = description;
            mc.template_ref = tpl.uuid;
            mc.requirement_ref =
                derived_uuid("er|" + (tag_er.empty() ? std::string("General") : tag_er));
            if (!tag_severity.empty()) mc.severity = tag_severity;
            mc.rules = materialize(con_drafts);
            root.concepts.push_back(std::move(mc));
        }

        doc.templates.push_back(std::move(tpl));
        view.roots.push_back(std::move(root));
    }

    doc.views.push_back(std::move(view));
    return doc;
}

}  // namespace mvd::xml
