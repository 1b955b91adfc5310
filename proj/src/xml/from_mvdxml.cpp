#include <map>
#include <set>

#include "mvd/lang/parser.hpp"
#include "mvd/xml/convert.hpp"

// mvdXML -> MVDLite.  Statements become rule chains by turning RuleID paths
// back into attribute navigation; a statement group re-correlates at the
// longest shared prefix of its leaf paths (lifted off collection-valued
// leaves, pinned to the enclosing point when the group negates anything),
// which is exactly the placement the exporter verified against.  Marker
// comments written by the exporter are parsed back as MVDLite source.
// The result is a parsed-stage ruleset; run lang::compile on it.

namespace mvd::xml {

namespace {

using lang::Connective;
using lang::MetricKind;

struct Step {
    std::string attribute;
    std::string entity;
    friend bool operator==(const Step&, const Step&) = default;
};
using Path = std::vector<Step>;

// --- RuleID -> template path ---------------------------------------------

using PathIndex = std::map<std::string, Path>;

void index_attrs(const std::vector<TemplateAttribute>& attrs, const Path& prefix,
                 PathIndex& ix) {
    for (const TemplateAttribute& a : attrs) {
        if (!a.rule_id.empty()) {
            Path p = prefix;
            // a single alternative names the entity; several leave it open
            p.push_back({a.attribute,
                         a.entities.size() == 1 ? a.entities.front().entity : std::string{}});
            ix.emplace(a.rule_id, std::move(p));
        }
        for (const TemplateEntity& e : a.entities) {
            Path p = prefix;
            p.push_back({a.attribute, e.entity});
            if (!e.rule_id.empty()) ix.emplace(e.rule_id, p);
            index_attrs(e.attributes, p, ix);
        }
    }
}

PathIndex index_template(const ConceptTemplate& tpl) {
    PathIndex ix;
    index_attrs(tpl.rules, {}, ix);
    return ix;
}

// --- statements -> chains -------------------------------------------------

class StatementImporter {
  public:
    StatementImporter(PathIndex index, std::string tpl_name)
        : index_(std::move(index)), tpl_(std::move(tpl_name)) {}

    lang::Chain chain_of(const Statement& s) const {
        lang::Chain chain;
        if (s.kind == Statement::Kind::Leaf) {
            append_nav(chain.segments, {}, path_of(s));
            chain.segments.emplace_back(metric_of(s));
            return chain;
        }
        Path at = placement(s, {});
        append_nav(chain.segments, {}, at);
        lang::CompoundSegment comp;
        comp.expr = wrapped(s, at);
        chain.segments.emplace_back(std::move(comp));
        return chain;
    }

  private:
    const Path& path_of(const Statement& leaf) const {
        auto it = index_.find(leaf.rule_id);
        if (it == index_.end())
            throw XmlError("template '" + tpl_ + "' has no RuleID '" + leaf.rule_id + "'");
        return it->second;
    }

    static bool is_collection(MetricKind m) {
        return m == MetricKind::Size || m == MetricKind::Exists || m == MetricKind::Unique;
    }

    // bare references and collection metrics constrain the whole node set,
    // so the branch point has to sit one hop above them
    static bool collection_leaf(const Statement& s) {
        return !s.has_constraint || is_collection(s.metric);
    }

    static bool contains_not(const Statement& s) {
        if (s.kind == Statement::Kind::Leaf) return false;
        if (s.op == Connective::Not) return true;
        for (const Statement& kid : s.children)
            if (contains_not(kid)) return true;
        return false;
    }

    void gather_leaves(const Statement& s, std::vector<const Statement*>& out) const {
        if (s.kind == Statement::Kind::Leaf) {
            out.push_back(&s);
            return;
        }
        for (const Statement& kid : s.children) gather_leaves(kid, out);
    }

    // Branch point of a group evaluated no shallower than base.
    Path placement(const Statement& s, const Path& base) const {
        if (contains_not(s)) return base;
        std::vector<const Statement*> leaves;
        gather_leaves(s, leaves);
        if (leaves.empty())
            throw XmlError("template '" + tpl_ + "': empty statement group");
        Path shared = path_of(*leaves.front());
        for (const Statement* l : leaves) {
            const Path& p = path_of(*l);
            std::size_t n = 0;
            while (n < shared.size() && n < p.size() && shared[n] == p[n]) ++n;
            shared.resize(n);
        }
        if (shared.size() < base.size()) return base;
        auto must_lift = [&] {
            if (shared.size() <= base.size()) return false;
            for (const Statement* l : leaves)
                if (path_of(*l) == shared && collection_leaf(*l)) return true;
            return false;
        };
        while (must_lift()) shared.pop_back();
        return shared;
    }

    void append_nav(std::vector<lang::Segment>& out, const Path& from, const Path& to) const {
        if (to.size() < from.size())
            throw XmlError("template '" + tpl_ + "': rule path escapes its branch point");
        for (std::size_t i = 0; i < from.size(); ++i)
            if (!(from[i] == to[i]))
                throw XmlError("template '" + tpl_ + "': rule path escapes its branch point");
        for (std::size_t i = from.size(); i < to.size(); ++i) {
            lang::AttributeSegment seg;
            seg.attribute = to[i].attribute;
            seg.type_constraint = to[i].entity;
            seg.constraint_explicit = !to[i].entity.empty();
            out.emplace_back(std::move(seg));
        }
    }

    static lang::MetricSegment metric_of(const Statement& leaf) {
        lang::MetricSegment m;
        if (!leaf.has_constraint) {
            m.metric = MetricKind::Exists;
            m.cmp = lang::Cmp::Eq;
            m.values.push_back(lang::Literal::boolean(true));
        } else {
            m.metric = leaf.metric;
            m.cmp = leaf.cmp;
            m.values.push_back(leaf.value);
        }
        return m;
    }

    // Renders s as one fragment of a compound applying at base.
    lang::LogicExpr wrapped(const Statement& s, const Path& base) const {
        if (s.kind == Statement::Kind::Leaf) {
            lang::Fragment frag;
            append_nav(frag.segments, base, path_of(s));
            frag.segments.emplace_back(metric_of(s));
            return lang::LogicExpr::make_leaf(std::move(frag));
        }
        if (s.op == Connective::Not)
            return lang::LogicExpr::make_op(Connective::Not,
                                            {wrapped(s.children.front(), base)});
        Path at = placement(s, base);
        if (at == base) return inline_group(s, base);
        lang::Fragment frag;
        append_nav(frag.segments, base, at);
        lang::CompoundSegment comp;
        comp.expr = inline_group(s, at);
        frag.segments.emplace_back(std::move(comp));
        return lang::LogicExpr::make_leaf(std::move(frag));
    }

    lang::LogicExpr inline_group(const Statement& s, const Path& base) const {
        std::vector<lang::LogicExpr> kids;
        kids.reserve(s.children.size());
        for (const Statement& kid : s.children) kids.push_back(wrapped(kid, base));
        return lang::LogicExpr::make_op(s.op, std::move(kids));
    }

    PathIndex index_;
    std::string tpl_;
};

// --- document assembly ----------------------------------------------------

lang::TagInfo tag_from(const std::string& description) {
    lang::TagInfo tag;
    if (description.empty()) return tag;
    nlohmann::json parsed = nlohmann::json::parse(description, nullptr, false);
    tag.present = true;
    tag.data = parsed.is_object() ? std::move(parsed)
                                  : nlohmann::json{{"description", description}};
    return tag;
}

// Rebuilds a construct tag from its XML attributes, skipping every value
// the exporter would have derived anyway so defaults stay tagless.
lang::TagInfo make_tag(const std::string& description, const std::string& uuid,
                       const std::string& derived_key, const std::string& code,
                       const std::string& er, const std::string& severity) {
    lang::TagInfo tag = tag_from(description);
    nlohmann::json& data = tag.data;
    if (!uuid.empty() && uuid != derived_uuid(derived_key) && !data.contains("uuid"))
        data["uuid"] = uuid;
    if (!code.empty() && !data.contains("code")) data["code"] = code;
    if (!er.empty() && er != "General" && !data.contains("er")) data["er"] = er;
    if (!severity.empty() && severity != "mandatory" && !data.contains("severity"))
        data["severity"] = severity;
    tag.present = !data.empty();
    return tag;
}

std::string er_name(const ModelView& view, const std::string& ref) {
    for (const ExchangeRequirement& er : view.requirements)
        if (er.uuid == ref) return er.name;
    return "";
}

void append_marker_rules(const std::string& payload, std::vector<lang::Rule>& out) {
    lang::RuleSet sub = lang::parse_ruleset(payload);
    for (lang::ConceptDef& c : sub.concepts)
        for (lang::Rule& r : c.constraint_rules) out.push_back(std::move(r));
}

// One TemplateRules block -> MVDLite rules.  AND blocks give one rule per
// entry; any other operator folds the entries into a single compound rule.
void append_block(const TemplateRuleBlock& block, const StatementImporter& imp,
                  std::vector<lang::Rule>& out) {
    if (block.op == Connective::And || block.entries.size() <= 1) {
        for (const RuleEntry& e : block.entries) {
            if (e.is_marker) {
                append_marker_rules(e.marker, out);
                continue;
            }
            lang::Rule r;
            r.chain = imp.chain_of(e.statement);
            r.tag = tag_from(e.description);
            out.push_back(std::move(r));
        }
        return;
    }
    std::vector<lang::LogicExpr> frags;
    frags.reserve(block.entries.size());
    for (const RuleEntry& e : block.entries) {
        if (e.is_marker)
            throw XmlError("marker comment inside a non-AND rule block");
        lang::Fragment frag;
        frag.segments = imp.chain_of(e.statement).segments;
        frags.push_back(lang::LogicExpr::make_leaf(std::move(frag)));
    }
    if (block.op == Connective::Not && frags.size() != 1)
        throw XmlError("NOT rule block needs exactly one rule");
    lang::CompoundSegment comp;
    comp.expr = lang::LogicExpr::make_op(block.op, std::move(frags));
    lang::Rule r;
    r.chain.segments.emplace_back(std::move(comp));
    out.push_back(std::move(r));
}

// MVDLite concept names are identifiers; mvdXML names are free text.
std::string identifier_of(const std::string& name) {
    std::string out;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_';
        out.push_back(ok ? c : '_');
    }
    if (out.empty() || (out.front() >= '0' && out.front() <= '9')) out.insert(0, "C");
    return out;
}

class Importer {
  public:
    Importer(const MvdXmlDoc& doc, const ifc::SchemaTable& schema)
        : doc_(doc), schema_(schema) {}

    lang::RuleSet run() {
        lang::RuleSet rs;
        rs.stage = lang::Stage::Parsed;
        for (const ModelView& v : doc_.views)
            if (!v.applicable_schema.empty()) {
                rs.schema_id = v.applicable_schema;
                break;
            }
        if (!rs.schema_id)
            for (const ConceptTemplate& t : doc_.templates)
                if (!t.applicable_schema.empty()) {
                    rs.schema_id = t.applicable_schema;
                    break;
                }
        for (const ModelView& view : doc_.views) {
            for (const std::string& payload : view.global_markers) {
                lang::RuleSet sub = lang::parse_ruleset(payload);
                for (lang::ConceptDef& c : sub.concepts) {
                    c.name = claim_name(c.name);
                    rs.concepts.push_back(std::move(c));
                }
            }
            for (const ConceptRoot& root : view.roots) import_root(rs, view, root);
        }
        return rs;
    }

  private:
    StatementImporter importer_for(const std::string& ref) const {
        const ConceptTemplate* tpl = doc_.find_template(ref);
        if (!tpl) throw XmlError("dangling template reference '" + ref + "'");
        return StatementImporter(index_template(*tpl), tpl->name);
    }

    std::string claim_name(const std::string& wanted) {
        std::string base = identifier_of(wanted.empty() ? "Concept" : wanted);
        if (used_names_.insert(base).second) return base;
        for (int n = 2;; ++n) {
            std::string candidate = base + "_" + std::to_string(n);
            if (used_names_.insert(candidate).second) return candidate;
        }
    }

    void import_root(lang::RuleSet& rs, const ModelView& view, const ConceptRoot& root) {
        if (!schema_.has_entity(root.applicable_root_entity))
            throw XmlError("ConceptRoot '" + root.name + "': unknown root entity '" +
                           root.applicable_root_entity + "'");

        lang::ConceptDef base;
        lang::Rule anchor;
        anchor.chain.segments.emplace_back(
            lang::InputAnchorSegment{root.applicable_root_entity});
        base.definition_rules.push_back(std::move(anchor));
        if (root.has_applicability)
            append_block(root.applicability, importer_for(root.applicability_template_ref),
                         base.definition_rules);

        bool merged = root.concepts.size() == 1 && root.concepts.front().name == root.name;
        if (merged) {
            const MvdConcept& mc = root.concepts.front();
            base.name = claim_name(root.name);
            append_block(mc.rules, importer_for(mc.template_ref), base.constraint_rules);
            base.tag = make_tag(mc.description, mc.uuid, "concept|" + mc.name, mc.code,
                                er_name(view, mc.requirement_ref), mc.severity);
            rs.concepts.push_back(std::move(base));
            return;
        }

        base.name = claim_name(root.name);
        base.tag = make_tag(root.description, root.uuid, "root|" + root.name, root.code,
                            "", "");
        std::string base_name = base.name;
        rs.concepts.push_back(std::move(base));
        for (const MvdConcept& mc : root.concepts) {
            lang::ConceptDef child;
            child.name = claim_name(mc.name);
            child.extends = base_name;
            append_block(mc.rules, importer_for(mc.template_ref), child.constraint_rules);
            child.tag = make_tag(mc.description, mc.uuid, "concept|" + mc.name, mc.code,
                                 er_name(view, mc.requirement_ref), mc.severity);
            rs.concepts.push_back(std::move(child));
        }
    }

    const MvdXmlDoc& doc_;
    const ifc::SchemaTable& schema_;
    std::set<std::string> used_names_;
};

}  // namespace

lang::RuleSet from_mvdxml(const MvdXmlDoc& doc, const ifc::SchemaTable& schema) {
    return Importer(doc, schema).run();
}

}  // namespace mvd::xml
